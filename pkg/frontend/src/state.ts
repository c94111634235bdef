import type { NetworkResponse, PredictionResponse, ScenarioRequest } from "./types.js";

export interface HistoryEntry {
  scenario: ScenarioRequest;
  response: PredictionResponse;
}

/**
 * Monotonic sequence gate: at most one submission per panel counts, and a
 * response for a superseded submission is discarded.
 */
export class RequestGate {
  private seq = 0;

  begin(): number {
    return ++this.seq;
  }

  isCurrent(token: number): boolean {
    return token === this.seq;
  }
}

export class UiState {
  network: NetworkResponse | null = null;
  lastResponse: PredictionResponse | null = null;
  history: HistoryEntry[] = [];
  readonly predictGate = new RequestGate();
  readonly sweepGate = new RequestGate();

  /** Record a completed what-if; stale tokens are ignored. */
  acceptPrediction(token: number, scenario: ScenarioRequest, response: PredictionResponse): boolean {
    if (!this.predictGate.isCurrent(token)) {
      return false;
    }
    this.lastResponse = response;
    this.history.push({ scenario, response });
    return true;
  }
}
