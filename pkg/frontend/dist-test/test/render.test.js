import assert from "node:assert/strict";
import { test } from "node:test";
import { escapeHtml, renderAnswer, renderBanner, renderClaim, renderCompanyList, renderDashboard, renderPageView, } from "../src/render.js";
import { loadFixture } from "./helpers.js";
const ask = loadFixture("ask.json");
const askMixed = loadFixture("ask_mixed.json");
const page = loadFixture("page.json");
const companies = loadFixture("companies.json");
const metrics = loadFixture("metrics.json");
const scores = loadFixture("scores.json");
test("every rendered claim carries a verification badge", () => {
    for (const fixture of [ask, askMixed]) {
        const html = renderAnswer(fixture);
        const badges = html.match(/class="badge[^"]*"/g) ?? [];
        assert.ok(fixture.claims.length > 0);
        assert.equal(badges.length, fixture.claims.length);
    }
});
test("verified and mismatch statuses render distinct badges", () => {
    const statuses = new Set(ask.claims.map((c) => c.status));
    assert.ok(statuses.has("Verified"));
    const html = renderAnswer(ask);
    assert.match(html, /badge verified/);
});
test("leakage claims get a warning badge with an explanation tooltip", () => {
    const leaked = askMixed.claims.filter((c) => c.status === "LeakageSuspected");
    assert.ok(leaked.length === 2, "mixed fixture carries the two leaked items");
    const html = renderClaim(leaked[0], askMixed.report_id);
    assert.match(html, /badge leakage/);
    assert.match(html, /title="[^"]*demonstration example[^"]*"/);
});
test("verification-error entries surface the error code as badge", () => {
    const entry = {
        claim: {
            question_id: "GRI_302_1",
            point: "Cited far beyond the document.",
            source_page: 999,
            section: "Summary",
            tone: null,
            value_magnitude: null,
            value_unit: null,
        },
        status: null,
        error: "MISSING_PAGE",
    };
    const html = renderClaim(entry, "r1");
    assert.match(html, /badge error/);
    assert.match(html, /MISSING_PAGE/);
});
test("page badges link to the page view with span data", () => {
    const verified = ask.claims.find((c) => c.status === "Verified");
    assert.ok(verified && verified.matched_span);
    const html = renderClaim(verified, ask.report_id);
    assert.match(html, /class="page-link"/);
    assert.match(html, /data-page="\d+"/);
    assert.match(html, /data-span="\d+:\d+"/);
});
test("sourceless claims render a no-source marker instead of a link", () => {
    const entry = {
        claim: {
            question_id: "x_1",
            point: "No data available.",
            source_page: 0,
            section: "Summary",
            tone: null,
            value_magnitude: null,
            value_unit: null,
        },
        status: "NotFound",
        matched_page: null,
        match_score: 0,
        leakage_score: 0,
        matched_span: null,
    };
    const html = renderClaim(entry, "r1");
    assert.match(html, /no source/);
    assert.doesNotMatch(html, /data-page=/);
});
test("page view highlights exactly the matched span", () => {
    const verified = ask.claims.find((c) => c.status === "Verified" && c.matched_span);
    assert.ok(verified);
    const span = verified.matched_span;
    const html = renderPageView(page, span);
    const marked = html.match(/<mark>([\s\S]*?)<\/mark>/);
    assert.ok(marked, "a mark element is present");
    const expected = escapeHtml(page.text.slice(span[0], span[1]));
    assert.equal(marked[1], expected);
});
test("page view without a span renders plain text", () => {
    const html = renderPageView(page, null);
    assert.doesNotMatch(html, /<mark>/);
    assert.ok(html.includes("page 93"));
});
test("prompt toggle and run metadata are present", () => {
    const html = renderAnswer(ask);
    assert.match(html, /<details class="raw-prompt">/);
    assert.match(html, /strategy s3/);
});
test("html is escaped in claim points", () => {
    const entry = {
        claim: {
            question_id: "x_1",
            point: "<script>alert('x')</script> & more",
            source_page: 1,
            section: "Summary",
            tone: null,
            value_magnitude: null,
            value_unit: null,
        },
        status: "NotFound",
        matched_span: null,
    };
    const html = renderClaim(entry, "r1");
    assert.doesNotMatch(html, /<script>/);
    assert.match(html, /&lt;script&gt;/);
});
test("company list renders all companies with memberships", () => {
    const html = renderCompanyList(companies, new Set([companies[0].company_id]));
    for (const company of companies) {
        assert.ok(html.includes(company.company_id));
    }
    assert.match(html, /checked/);
});
test("empty company list shows guidance text", () => {
    const html = renderCompanyList([], new Set());
    assert.match(html, /No companies yet/);
});
test("dashboard scatter has one point per scored company and the service r", () => {
    const html = renderDashboard(companies, scores, metrics);
    const points = html.match(/<circle class="pt"/g) ?? [];
    assert.equal(points.length, 20);
    assert.ok(html.includes(`data-r="${metrics.pearson_r}"`), "displayed correlation is the /metrics value verbatim");
    assert.match(html, new RegExp(`r = ${metrics.pearson_r.toFixed(3)}`));
});
test("missing reference scores render as absent, never zero", () => {
    const partial = {
        [companies[0].company_id]: {
            company_id: companies[0].company_id,
            scores: [
                { fiscal_year: 2022, score: 61.2, kind: "Predicted", model_run_id: "m1" },
            ],
        },
    };
    const html = renderDashboard([companies[0]], partial, null);
    assert.match(html, /bar absent/);
    assert.doesNotMatch(html, /class="bar reference" [^>]*height:0%/);
    const points = html.match(/<circle class="pt"/g) ?? [];
    assert.equal(points.length, 0, "no scatter point without both scores");
});
test("dashboard axes are fixed to the 0..100 frame", () => {
    const html = renderDashboard(companies, scores, metrics);
    for (const match of html.matchAll(/cx="([\d.]+)" cy="([\d.]+)"/g)) {
        const cx = Number(match[1]);
        const cy = Number(match[2]);
        assert.ok(cx >= 24 && cx <= 316);
        assert.ok(cy >= 24 && cy <= 216);
    }
});
test("banner renders retry affordance only when retryable", () => {
    assert.match(renderBanner({ message: "down", retryable: true }), /retry/);
    assert.doesNotMatch(renderBanner({ message: "bad", retryable: false }), /<button/);
    assert.equal(renderBanner(null), "");
});
