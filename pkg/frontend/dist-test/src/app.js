/** DOM bootstrap: wires the pure modules to the page served at /ui. */
import { ApiClient, ApiError } from "./api.js";
import { comparisonEnabled, initialState, recordAnswer, recordFailure, setCompanies, toggleSelection, visibleCompanies, } from "./state.js";
import { renderAnswer, renderBanner, renderCompanyList, renderDashboard, renderPageView, } from "./render.js";
const api = new ApiClient("");
const state = initialState();
function el(id) {
    const node = document.getElementById(id);
    if (!node) {
        throw new Error(`missing element #${id}`);
    }
    return node;
}
function redrawCompanies() {
    el("company-list").innerHTML = renderCompanyList(visibleCompanies(state), state.selected);
    el("compare").disabled = !comparisonEnabled(state);
}
function redrawSession() {
    el("banner").innerHTML = renderBanner(state.banner);
    el("session").innerHTML = state.turns
        .map((turn) => turn.answer
        ? renderAnswer(turn.answer)
        : `<section class="answer failed"><h3>${turn.question}</h3>` +
            `<p class="error">${turn.errorCode}: ${turn.errorMessage}</p></section>`)
        .join("");
}
async function refreshCompanies() {
    try {
        setCompanies(state, await api.companies());
        state.banner = null;
    }
    catch (err) {
        const apiErr = err;
        state.banner = { message: apiErr.message, retryable: apiErr.retryable };
    }
    redrawCompanies();
    el("banner").innerHTML = renderBanner(state.banner);
}
async function submitQuestion() {
    const question = el("question").value.trim();
    const report = el("report").value.trim();
    if (!question || !report) {
        return;
    }
    state.activeReport = report;
    state.strategy = el("strategy").value;
    try {
        const answer = await api.ask(report, question, state.strategy);
        recordAnswer(state, question, answer);
    }
    catch (err) {
        const apiErr = err instanceof ApiError ? err : new ApiError("UNKNOWN", String(err));
        recordFailure(state, question, apiErr.code, apiErr.message, apiErr.retryable);
    }
    redrawSession();
}
async function openPage(target) {
    const report = target.dataset.report;
    const page = Number(target.dataset.page);
    if (!report || !page) {
        return;
    }
    const rawSpan = target.dataset.span;
    const span = rawSpan
        ? rawSpan.split(":").map(Number)
        : null;
    try {
        const text = await api.pageText(report, page);
        el("page-view").innerHTML = renderPageView(text, span);
    }
    catch (err) {
        el("page-view").innerHTML = `<p class="error">${err.message}</p>`;
    }
}
async function refreshDashboard() {
    const chosen = visibleCompanies(state).filter((c) => state.selected.has(c.company_id));
    const scores = {};
    let metrics = null;
    for (const company of chosen) {
        try {
            const payload = await api.scores(company.company_id);
            scores[company.company_id] = payload;
            const predicted = payload.scores.find((s) => s.kind === "Predicted");
            if (metrics === null && predicted?.model_run_id) {
                metrics = await api.metrics(predicted.model_run_id);
            }
        }
        catch {
            // companies without scores simply render as absent
        }
    }
    el("dashboard").innerHTML = renderDashboard(chosen, scores, metrics);
}
export function boot() {
    void refreshCompanies();
    el("ask-form").addEventListener("submit", (event) => {
        event.preventDefault();
        void submitQuestion();
    });
    el("membership").addEventListener("change", (event) => {
        const value = event.target.value;
        state.membershipFilter = value === "all" ? null : value;
        redrawCompanies();
    });
    el("company-list").addEventListener("change", (event) => {
        const box = event.target;
        if (box.dataset.company) {
            toggleSelection(state, box.dataset.company);
            el("compare").disabled = !comparisonEnabled(state);
        }
    });
    el("compare").addEventListener("click", () => void refreshDashboard());
    el("session").addEventListener("click", (event) => {
        const link = event.target.closest(".page-link");
        if (link && link.dataset.page) {
            event.preventDefault();
            void openPage(link);
        }
    });
    el("banner").addEventListener("click", (event) => {
        if (event.target.classList.contains("retry")) {
            void refreshCompanies();
        }
    });
}
if (typeof document !== "undefined" && document.getElementById("ask-form")) {
    boot();
}
