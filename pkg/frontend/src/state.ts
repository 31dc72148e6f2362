/** Client-side session state.
 *
 * Selection and Q&A history live only in the browser; the service stays
 * stateless. A transport error never clears the session, it only surfaces a
 * banner, so earlier answers keep informing the next question.
 */

import type { Answer, Company } from "./types.js";

export interface AskTurn {
  question: string;
  answer?: Answer;
  errorCode?: string;
  errorMessage?: string;
}

export interface SessionState {
  companies: Company[];
  membershipFilter: string | null;
  selected: Set<string>;
  activeReport: string | null;
  strategy: string;
  turns: AskTurn[];
  banner: { message: string; retryable: boolean } | null;
}

export function initialState(): SessionState {
  return {
    companies: [],
    membershipFilter: null,
    selected: new Set(),
    activeReport: null,
    strategy: "s3",
    turns: [],
    banner: null,
  };
}

export function setCompanies(state: SessionState, companies: Company[]): void {
  state.companies = companies;
  for (const id of [...state.selected]) {
    if (!companies.some((c) => c.company_id === id)) {
      state.selected.delete(id);
    }
  }
}

export function visibleCompanies(state: SessionState): Company[] {
  if (state.membershipFilter === null) {
    return state.companies;
  }
  const filter = state.membershipFilter;
  return state.companies.filter((c) => c.index_membership.includes(filter));
}

export function toggleSelection(state: SessionState, companyId: string): void {
  if (state.selected.has(companyId)) {
    state.selected.delete(companyId);
  } else {
    state.selected.add(companyId);
  }
}

export function comparisonEnabled(state: SessionState): boolean {
  return state.selected.size >= 1;
}

export function recordAnswer(state: SessionState, question: string,
                             answer: Answer): void {
  state.turns.push({ question, answer });
  state.banner = null;
}

export function recordFailure(state: SessionState, question: string,
                              code: string, message: string,
                              retryable: boolean): void {
  // the session list is preserved; only a banner is raised
  state.turns.push({ question, errorCode: code, errorMessage: message });
  state.banner = { message: `${code}: ${message}`, retryable };
}
