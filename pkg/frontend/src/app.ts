/** DOM bootstrap: wires the pure modules to the page served at /ui. */

import { ApiClient, ApiError } from "./api.js";
import {
  comparisonEnabled,
  initialState,
  recordAnswer,
  recordFailure,
  setCompanies,
  toggleSelection,
  visibleCompanies,
} from "./state.js";
import {
  renderAnswer,
  renderBanner,
  renderCompanyList,
  renderDashboard,
  renderPageView,
} from "./render.js";
import type { CompanyScores, Metrics } from "./types.js";

const api = new ApiClient("");
const state = initialState();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function redrawCompanies(): void {
  el("company-list").innerHTML = renderCompanyList(
    visibleCompanies(state), state.selected);
  el<HTMLButtonElement>("compare").disabled = !comparisonEnabled(state);
}

function redrawSession(): void {
  el("banner").innerHTML = renderBanner(state.banner);
  el("session").innerHTML = state.turns
    .map((turn) =>
      turn.answer
        ? renderAnswer(turn.answer)
        : `<section class="answer failed"><h3>${turn.question}</h3>` +
          `<p class="error">${turn.errorCode}: ${turn.errorMessage}</p></section>`)
    .join("");
}

async function refreshCompanies(): Promise<void> {
  try {
    setCompanies(state, await api.companies());
    state.banner = null;
  } catch (err) {
    const apiErr = err as ApiError;
    state.banner = { message: apiErr.message, retryable: apiErr.retryable };
  }
  redrawCompanies();
  el("banner").innerHTML = renderBanner(state.banner);
}

async function submitQuestion(): Promise<void> {
  const question = el<HTMLInputElement>("question").value.trim();
  const report = el<HTMLInputElement>("report").value.trim();
  if (!question || !report) {
    return;
  }
  state.activeReport = report;
  state.strategy = el<HTMLSelectElement>("strategy").value;
  try {
    const answer = await api.ask(report, question, state.strategy);
    recordAnswer(state, question, answer);
  } catch (err) {
    const apiErr = err instanceof ApiError ? err : new ApiError("UNKNOWN", String(err));
    recordFailure(state, question, apiErr.code, apiErr.message, apiErr.retryable);
  }
  redrawSession();
}

async function openPage(target: HTMLElement): Promise<void> {
  const report = target.dataset.report;
  const page = Number(target.dataset.page);
  if (!report || !page) {
    return;
  }
  const rawSpan = target.dataset.span;
  const span = rawSpan
    ? (rawSpan.split(":").map(Number) as [number, number])
    : null;
  try {
    const text = await api.pageText(report, page);
    el("page-view").innerHTML = renderPageView(text, span);
  } catch (err) {
    el("page-view").innerHTML = `<p class="error">${(err as Error).message}</p>`;
  }
}

async function refreshDashboard(): Promise<void> {
  const chosen = visibleCompanies(state).filter((c) =>
    state.selected.has(c.company_id));
  const scores: Record<string, CompanyScores> = {};
  let metrics: Metrics | null = null;
  for (const company of chosen) {
    try {
      const payload = await api.scores(company.company_id);
      scores[company.company_id] = payload;
      const predicted = payload.scores.find((s) => s.kind === "Predicted");
      if (metrics === null && predicted?.model_run_id) {
        metrics = await api.metrics(predicted.model_run_id);
      }
    } catch {
      // companies without scores simply render as absent
    }
  }
  el("dashboard").innerHTML = renderDashboard(chosen, scores, metrics);
}

export function boot(): void {
  void refreshCompanies();
  el("ask-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void submitQuestion();
  });
  el("membership").addEventListener("change", (event) => {
    const value = (event.target as HTMLSelectElement).value;
    state.membershipFilter = value === "all" ? null : value;
    redrawCompanies();
  });
  el("company-list").addEventListener("change", (event) => {
    const box = event.target as HTMLInputElement;
    if (box.dataset.company) {
      toggleSelection(state, box.dataset.company);
      el<HTMLButtonElement>("compare").disabled = !comparisonEnabled(state);
    }
  });
  el("compare").addEventListener("click", () => void refreshDashboard());
  el("session").addEventListener("click", (event) => {
    const link = (event.target as HTMLElement).closest<HTMLElement>(".page-link");
    if (link && link.dataset.page) {
      event.preventDefault();
      void openPage(link);
    }
  });
  el("banner").addEventListener("click", (event) => {
    if ((event.target as HTMLElement).classList.contains("retry")) {
      void refreshCompanies();
    }
  });
}

if (typeof document !== "undefined" && document.getElementById("ask-form")) {
  boot();
}
