import assert from "node:assert/strict";
import { test } from "node:test";
import { comparisonEnabled, initialState, recordAnswer, recordFailure, setCompanies, toggleSelection, visibleCompanies, } from "../src/state.js";
import { loadFixture } from "./helpers.js";
const companies = loadFixture("companies.json");
const answer = loadFixture("ask.json");
test("membership filter narrows the visible list", () => {
    const state = initialState();
    setCompanies(state, companies);
    state.membershipFilter = "Russell1000";
    const visible = visibleCompanies(state);
    assert.ok(visible.length > 0);
    assert.ok(visible.every((c) => c.index_membership.includes("Russell1000")));
    state.membershipFilter = null;
    assert.equal(visibleCompanies(state).length, companies.length);
});
test("selection persists across filter changes and enables comparison", () => {
    const state = initialState();
    setCompanies(state, companies);
    assert.equal(comparisonEnabled(state), false);
    toggleSelection(state, companies[0].company_id);
    toggleSelection(state, companies[1].company_id);
    state.membershipFilter = "QQQ";
    assert.ok(state.selected.has(companies[0].company_id));
    assert.ok(comparisonEnabled(state));
    toggleSelection(state, companies[0].company_id);
    assert.ok(!state.selected.has(companies[0].company_id));
});
test("answers append to the session history", () => {
    const state = initialState();
    recordAnswer(state, "GRI_302_1", answer);
    recordAnswer(state, "water use?", answer);
    assert.equal(state.turns.length, 2);
    assert.equal(state.turns[0].question, "GRI_302_1");
    assert.equal(state.banner, null);
});
test("a failure raises the banner but preserves earlier turns", () => {
    const state = initialState();
    recordAnswer(state, "GRI_302_1", answer);
    recordFailure(state, "follow-up", "UNREACHABLE", "service offline", true);
    assert.equal(state.turns.length, 2);
    assert.equal(state.turns[0].answer, answer);
    assert.ok(state.banner && state.banner.retryable);
    // recovery clears the banner without touching history
    recordAnswer(state, "retry question", answer);
    assert.equal(state.turns.length, 3);
    assert.equal(state.banner, null);
});
test("companies that disappear from the service are deselected", () => {
    const state = initialState();
    setCompanies(state, companies);
    toggleSelection(state, companies[0].company_id);
    setCompanies(state, companies.slice(1));
    assert.ok(!state.selected.has(companies[0].company_id));
});
