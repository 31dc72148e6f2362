/** Pure rendering: state in, HTML string out.
 *
 * Nothing here computes a score or a verification verdict; every rendered
 * field comes from a service response. A claim is never displayed without
 * its verification badge, and a claim whose verification errored carries
 * the error code as its badge.
 */

import type {
  Answer,
  ClaimEntry,
  Company,
  CompanyScores,
  Metrics,
  PageText,
} from "./types.js";

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

const BADGE_CLASSES: Record<string, string> = {
  Verified: "badge verified",
  PageMismatch: "badge mismatch",
  NotFound: "badge notfound",
  LeakageSuspected: "badge leakage",
};

const BADGE_TOOLTIPS: Record<string, string> = {
  Verified: "The claim text and its numbers were found on the cited page.",
  PageMismatch: "The claim matches the report, but on a different page than cited.",
  NotFound: "No sufficiently similar passage exists in the report.",
  LeakageSuspected:
    "The claim reproduces a prompt demonstration example; it is not evidence from this report.",
};

export function verificationBadge(entry: ClaimEntry): string {
  if (entry.error) {
    return `<span class="badge error" title="Verification failed">${escapeHtml(entry.error)}</span>`;
  }
  const status = entry.status ?? "Unknown";
  const cls = BADGE_CLASSES[status] ?? "badge";
  const tip = BADGE_TOOLTIPS[status] ?? "";
  return `<span class="${cls}" title="${escapeHtml(tip)}">${escapeHtml(status)}</span>`;
}

export function renderClaim(entry: ClaimEntry, reportId: string): string {
  const claim = entry.claim;
  const span = entry.matched_span ?? null;
  const spanAttr = span ? ` data-span="${span[0]}:${span[1]}"` : "";
  const page = span && entry.matched_page ? entry.matched_page : claim.source_page;
  const pageBadge =
    claim.source_page > 0 || entry.matched_page
      ? `<a class="page-link" href="#page" data-report="${escapeHtml(reportId)}"` +
        ` data-page="${page}"${spanAttr}>p.${page}</a>`
      : `<span class="page-link none">no source</span>`;
  const tone = claim.tone
    ? `<span class="tone tone-${claim.tone.toLowerCase()}">${escapeHtml(claim.tone)}</span>`
    : "";
  const value =
    claim.value_magnitude !== null
      ? `<span class="value-chip">${escapeHtml(claim.value_magnitude)}` +
        `${claim.value_unit ? " " + escapeHtml(claim.value_unit) : ""}</span>`
      : "";
  return (
    `<li class="claim" data-question="${escapeHtml(claim.question_id)}">` +
    `<p class="point">${escapeHtml(claim.point)}</p>` +
    `<div class="meta">${pageBadge}${tone}${value}${verificationBadge(entry)}</div>` +
    `</li>`
  );
}

export function renderAnswer(answer: Answer): string {
  const claims = answer.claims.map((c) => renderClaim(c, answer.report_id)).join("");
  const lenientNote = answer.lenient
    ? `<span class="lenient" title="The response needed lenient parsing">lenient parse</span>`
    : "";
  return (
    `<section class="answer">` +
    `<h3>${escapeHtml(answer.question_id)}: ${escapeHtml(answer.question_text)}</h3>` +
    `<div class="run-meta">strategy ${escapeHtml(answer.strategy)} ${lenientNote}</div>` +
    `<ul class="claims">${claims}</ul>` +
    `<details class="raw-prompt"><summary>prompt</summary>` +
    `<pre>${escapeHtml(answer.prompt)}</pre></details>` +
    `</section>`
  );
}

/** Page text with the matched span highlighted. */
export function renderPageView(page: PageText,
                               span: [number, number] | null): string {
  const text = page.text;
  let body: string;
  if (span && span[0] >= 0 && span[1] <= text.length && span[0] < span[1]) {
    body =
      escapeHtml(text.slice(0, span[0])) +
      `<mark>${escapeHtml(text.slice(span[0], span[1]))}</mark>` +
      escapeHtml(text.slice(span[1]));
  } else {
    body = escapeHtml(text);
  }
  return (
    `<section class="page-view"><h4>page ${page.page_number}</h4>` +
    `<pre class="page-text">${body}</pre></section>`
  );
}

export function renderCompanyList(companies: Company[],
                                  selected: Set<string>): string {
  if (companies.length === 0) {
    return `<p class="empty">No companies yet. Ingest reports with the esglens CLI, then reload.</p>`;
  }
  const rows = companies
    .map((company) => {
      const checked = selected.has(company.company_id) ? " checked" : "";
      const membership = company.index_membership.join(", ");
      return (
        `<li><label><input type="checkbox" data-company="${escapeHtml(company.company_id)}"${checked}>` +
        `${escapeHtml(company.name)} <small>${escapeHtml(membership)}</small></label></li>`
      );
    })
    .join("");
  return `<ul class="companies">${rows}</ul>`;
}

export function renderBanner(banner: { message: string; retryable: boolean } | null): string {
  if (!banner) {
    return "";
  }
  const retry = banner.retryable ? `<button class="retry">retry</button>` : "";
  return `<div class="banner">${escapeHtml(banner.message)}${retry}</div>`;
}

function scoreOf(scores: CompanyScores, kind: "Predicted" | "Reference"): number | null {
  const record = scores.scores.find((s) => s.kind === kind);
  return record ? record.score : null;
}

const CHART_W = 340;
const CHART_H = 240;
const PAD = 24;

/** Paired bars per company plus a predicted-vs-reference scatter.
 *
 * Axes are fixed to 0..100. A missing reference renders as an absent
 * marker, never as a zero bar. The displayed correlation is the service's
 * metric verbatim (kept raw in data-r).
 */
export function renderDashboard(companies: Company[],
                                scoresByCompany: Record<string, CompanyScores>,
                                metrics: Metrics | null): string {
  if (companies.length === 0) {
    return `<p class="empty">No scored companies selected. Train with: esglens pipeline or POST /train.</p>`;
  }
  const bars = companies
    .map((company) => {
      const scores = scoresByCompany[company.company_id];
      const predicted = scores ? scoreOf(scores, "Predicted") : null;
      const reference = scores ? scoreOf(scores, "Reference") : null;
      const bar = (value: number | null, kind: string) =>
        value === null
          ? `<div class="bar absent" data-kind="${kind}">absent</div>`
          : `<div class="bar ${kind}" data-kind="${kind}" style="height:${(value / 100) * 100}%"` +
            ` title="${value.toFixed(1)}"></div>`;
      return (
        `<figure class="company-bars" data-company="${escapeHtml(company.company_id)}">` +
        `<div class="bars">${bar(predicted, "predicted")}${bar(reference, "reference")}</div>` +
        `<figcaption>${escapeHtml(company.name)}</figcaption></figure>`
      );
    })
    .join("");

  const points = companies
    .flatMap((company) => {
      const scores = scoresByCompany[company.company_id];
      if (!scores) {
        return [];
      }
      const predicted = scoreOf(scores, "Predicted");
      const reference = scoreOf(scores, "Reference");
      if (predicted === null || reference === null) {
        return [];
      }
      const cx = PAD + (reference / 100) * (CHART_W - 2 * PAD);
      const cy = CHART_H - PAD - (predicted / 100) * (CHART_H - 2 * PAD);
      return [
        `<circle class="pt" cx="${cx.toFixed(1)}" cy="${cy.toFixed(1)}" r="3">` +
        `<title>${escapeHtml(company.company_id)}</title></circle>`,
      ];
    })
    .join("");
  const r = metrics?.pearson_r ?? null;
  const rLabel = r === null ? "r unavailable" : `r = ${r.toFixed(3)}`;
  return (
    `<section class="dashboard">` +
    `<div class="bar-panel">${bars}</div>` +
    `<svg class="scatter" viewBox="0 0 ${CHART_W} ${CHART_H}" data-r="${r === null ? "" : r}">` +
    `<line x1="${PAD}" y1="${CHART_H - PAD}" x2="${CHART_W - PAD}" y2="${CHART_H - PAD}" class="axis"/>` +
    `<line x1="${PAD}" y1="${PAD}" x2="${PAD}" y2="${CHART_H - PAD}" class="axis"/>` +
    points +
    `<text x="${CHART_W - PAD}" y="${PAD}" text-anchor="end" class="r-label">${rLabel}</text>` +
    `</svg>` +
    `</section>`
  );
}
