/** Thin typed client over the esglens HTTP API.
 *
 * The fetch implementation is injectable so tests run without a network or
 * a DOM. Failures normalize to ApiError: service error bodies keep their
 * stable code, transport failures become the retryable "UNREACHABLE".
 */
export class ApiError extends Error {
    code;
    retryable;
    constructor(code, message) {
        super(message);
        this.code = code;
        this.retryable = code === "UNREACHABLE";
    }
}
export class ApiClient {
    baseUrl;
    fetchImpl;
    constructor(baseUrl = "", fetchImpl = (input, init) => fetch(input, init)) {
        this.baseUrl = baseUrl;
        this.fetchImpl = fetchImpl;
    }
    async request(path, init) {
        let response;
        try {
            response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
        }
        catch (err) {
            throw new ApiError("UNREACHABLE", `service unreachable: ${String(err)}`);
        }
        if (!response.ok) {
            let code = `HTTP_${response.status}`;
            let message = response.statusText;
            try {
                const body = (await response.json());
                if (body?.error?.code) {
                    code = body.error.code;
                    message = body.error.message;
                }
            }
            catch {
                // non-JSON error body: keep the HTTP status code
            }
            throw new ApiError(code, message);
        }
        return (await response.json());
    }
    health() {
        return this.request("/health");
    }
    companies() {
        return this.request("/companies");
    }
    questions() {
        return this.request("/questions");
    }
    ask(reportId, question, strategy) {
        return this.request("/ask", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({
                report_id: reportId,
                question,
                strategy: strategy ?? null,
            }),
        });
    }
    pageText(reportId, pageNumber) {
        return this.request(`/reports/${encodeURIComponent(reportId)}/pages/${pageNumber}`);
    }
    scores(companyId) {
        return this.request(`/scores/${encodeURIComponent(companyId)}`);
    }
    metrics(runId) {
        return this.request(`/metrics/${encodeURIComponent(runId)}`);
    }
}
