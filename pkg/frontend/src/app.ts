// DOM wiring for the what-if explorer.  All state lives in the draft plus
// the latest service responses; rendering is a pure function of those.

import * as api from "./api.js";
import { nonNestedMarket, solarSystemMarket } from "./samples.js";
import { isValidMarketDocument, validateMarketDocument } from "./schema.js";
import {
  BuiltRequest,
  DraftRow,
  FrontierView,
  MarketDraft,
  RequestSequencer,
  buildRequest,
  chartPoints,
  draftFromDocument,
  emptyDraft,
  exportDocument,
  formatValue,
  frontierView,
  fullPrecision,
  hasUnitCosts,
  highlightedPrefix,
  isProblem,
  residualBudgetOf,
  resultView,
  rowIssues,
} from "./viewmodel.js";

interface AppState {
  draft: MarketDraft;
  frontier: FrontierView | null;
  result: ReturnType<typeof resultView> | null;
  notice: string;
}

const solveSequencer = new RequestSequencer();
const frontierSequencer = new RequestSequencer();

export function mount(root: HTMLElement): void {
  const state: AppState = {
    draft: draftFromDocument(solarSystemMarket),
    frontier: null,
    result: null,
    notice: "",
  };

  root.innerHTML = `
    <h1>Application strategy explorer</h1>
    <p class="notice" id="notice"></p>
    <section id="market">
      <h2>Market</h2>
      <div>
        <button id="load-solar">Load planet sample</button>
        <button id="load-nonnested">Load budget-flip sample</button>
        <button id="add-row">Add school</button>
        <button id="export">Export JSON</button>
        <input id="import-file" type="file" accept="application/json" />
      </div>
      <label>Outside option <input id="t0" size="6"></label>
      <label>Budget <input id="budget" size="6"></label>
      <table id="grid">
        <thead><tr><th>School</th><th>Utility</th><th>Admission prob.</th>
        <th>Fee</th><th>Lock</th></tr></thead>
        <tbody></tbody>
      </table>
      <label>Algorithm
        <select id="algorithm">
          <option>auto</option><option>greedy</option><option>bnb</option>
          <option>dp</option><option>fptas</option><option>sa</option>
        </select>
      </label>
      <label>Tolerance <input id="epsilon" size="5"></label>
      <label>Annealer seed <input id="sa-seed" size="8"></label>
      <button id="solve">Solve</button>
    </section>
    <section id="frontier-section">
      <h2>Value frontier</h2>
      <label>Application limit <input id="slider" type="range" min="1" max="1" value="1"></label>
      <svg id="chart" width="420" height="160" viewBox="0 0 420 160"></svg>
      <ol id="entry-list"></ol>
    </section>
    <section id="result-section">
      <h2>Result</h2>
      <div id="result"></div>
    </section>
  `;

  const q = <T extends HTMLElement>(sel: string) => root.querySelector(sel) as T;

  function readDraftInputs(): void {
    state.draft.t0 = q<HTMLInputElement>("#t0").value;
    state.draft.budget = q<HTMLInputElement>("#budget").value;
    state.draft.algorithm = q<HTMLSelectElement>("#algorithm").value;
    state.draft.epsilon = q<HTMLInputElement>("#epsilon").value;
    state.draft.saSeed = q<HTMLInputElement>("#sa-seed").value;
  }

  function renderGrid(): void {
    q<HTMLInputElement>("#t0").value = state.draft.t0;
    q<HTMLInputElement>("#budget").value = state.draft.budget;
    q<HTMLSelectElement>("#algorithm").value = state.draft.algorithm;
    q<HTMLInputElement>("#epsilon").value = state.draft.epsilon;
    q<HTMLInputElement>("#sa-seed").value = state.draft.saSeed;
    const body = root.querySelector("#grid tbody") as HTMLElement;
    body.innerHTML = "";
    state.draft.rows.forEach((row, i) => {
      const tr = document.createElement("tr");
      const issues = rowIssues(row);
      const cell = (field: keyof DraftRow, issue: string | null) => {
        const td = document.createElement("td");
        const input = document.createElement("input");
        input.value = row[field];
        input.size = field === "label" ? 18 : 6;
        if (issue) {
          input.className = "invalid";
          input.title = issue;
        }
        input.addEventListener("change", () => {
          (row[field] as string) = input.value;
          refresh();
        });
        td.appendChild(input);
        return td;
      };
      tr.appendChild(cell("label", null));
      tr.appendChild(cell("t", issues.t));
      tr.appendChild(cell("f", issues.f));
      tr.appendChild(cell("g", issues.g));
      const lockTd = document.createElement("td");
      const lock = document.createElement("select");
      for (const option of ["none", "in", "out"]) {
        const el = document.createElement("option");
        el.textContent = option;
        lock.appendChild(el);
      }
      lock.value = row.lock;
      lock.addEventListener("change", () => {
        row.lock = lock.value as DraftRow["lock"];
        void runWhatIf();
      });
      lockTd.appendChild(lock);
      tr.appendChild(lockTd);
      body.appendChild(tr);
    });
  }

  function renderFrontier(): void {
    const section = q<HTMLElement>("#frontier-section");
    const built = buildRequest(state.draft);
    const unit = !isProblem(built) && hasUnitCosts(built.market);
    section.style.display = unit ? "" : "none";
    if (!unit || !state.frontier) return;
    const slider = q<HTMLInputElement>("#slider");
    slider.max = String(state.frontier.entries.length);
    slider.value = String(state.frontier.sliderH);
    const highlighted = new Set(
      highlightedPrefix(state.frontier, state.frontier.sliderH)
    );
    const list = q<HTMLElement>("#entry-list");
    list.innerHTML = "";
    for (const entry of state.frontier.entries) {
      const li = document.createElement("li");
      li.textContent = `${entry.label ?? `school ${entry.index + 1}`} — value ${formatValue(entry.value)}`;
      li.title = fullPrecision(entry.value);
      if (highlighted.has(entry.index)) li.className = "highlighted";
      list.appendChild(li);
    }
    const points = chartPoints(state.frontier);
    const maxV = Math.max(...points.map((p) => p.value), 1);
    const path = points
      .map((p) => `${20 + (380 * (p.h - 1)) / Math.max(points.length - 1, 1)},${150 - (130 * p.value) / maxV}`)
      .join(" ");
    q<HTMLElement>("#chart").innerHTML =
      `<polyline fill="none" stroke="currentColor" points="${path}"/>`;
  }

  function renderResult(): void {
    q<HTMLElement>("#notice").textContent = state.notice;
    const target = q<HTMLElement>("#result");
    if (!state.result) {
      target.textContent = "";
      return;
    }
    const r = state.result;
    const rows = r.attendance
      .map((a) => `<tr><td>${a.label}</td><td>${a.probability}</td></tr>`)
      .join("");
    target.innerHTML = `
      <p>${r.solver} (${r.certificate})</p>
      <p>Apply to: ${r.memberLabels.join(", ") || "(nothing)"}</p>
      <p>Expected utility: <span title="${r.valueExact}">${r.value}</span></p>
      ${r.residualBudget !== null ? `<p>Residual budget: ${r.residualBudget}</p>` : ""}
      ${r.deltaVsUnconstrained !== null ? `<p>Drop vs. unconstrained: ${r.deltaVsUnconstrained}</p>` : ""}
      <table><thead><tr><th>Outcome</th><th>Probability</th></tr></thead>
      <tbody>${rows}</tbody></table>
    `;
  }

  function refresh(): void {
    renderGrid();
    renderFrontier();
    renderResult();
  }

  function solveParams(built: BuiltRequest) {
    const params: api.SolveParams = { algorithm: state.draft.algorithm };
    const epsilon = Number(state.draft.epsilon);
    if (Number.isFinite(epsilon)) params.epsilon = epsilon;
    if (state.draft.algorithm === "sa") {
      params.sa = { seed: Number(state.draft.saSeed) | 0 };
    }
    if (state.draft.algorithm === "greedy") {
      params.h = Math.min(
        built.market.schools.length,
        Math.floor(built.market.budget)
      );
    }
    return params;
  }

  async function runFrontier(): Promise<void> {
    readDraftInputs();
    const built = buildRequest(state.draft);
    if (isProblem(built) || !hasUnitCosts(built.market)) {
      state.frontier = null;
      refresh();
      return;
    }
    const ticket = frontierSequencer.next();
    try {
      const response = await api.frontierOf(built.market);
      if (!frontierSequencer.isCurrent(ticket)) return; // stale
      state.frontier = frontierView(response, state.frontier?.sliderH ?? 1);
      state.notice = "";
    } catch (err) {
      state.notice =
        err instanceof api.ApiError && err.code === "unit_costs_required"
          ? "Frontier needs unit fees; use the budget box instead."
          : String(err);
    }
    refresh();
  }

  async function runWhatIf(): Promise<void> {
    readDraftInputs();
    const built = buildRequest(state.draft);
    if (isProblem(built)) {
      state.notice = built.message;
      refresh();
      return;
    }
    if (residualBudgetOf(built) < 0) {
      state.notice = "Locked-in fees exceed the budget.";
      refresh();
      return;
    }
    const ticket = solveSequencer.next();
    try {
      const params = solveParams(built);
      const [constrained, unconstrained] = await Promise.all([
        api.whatIf(built.market, built.lockedIn, built.lockedOut, params),
        api.solve(built.market, params),
      ]);
      if (!solveSequencer.isCurrent(ticket)) return; // stale
      state.result = resultView(constrained, built.market, unconstrained);
      state.notice =
        built.skippedRows.length > 0
          ? `${built.skippedRows.length} invalid row(s) excluded.`
          : "";
    } catch (err) {
      state.notice =
        err instanceof api.ApiError && err.path
          ? `${err.path}: ${err.message}`
          : String(err);
    }
    refresh();
  }

  q<HTMLElement>("#load-solar").addEventListener("click", () => {
    state.draft = draftFromDocument(solarSystemMarket);
    state.frontier = null;
    refresh();
    void runFrontier();
    void runWhatIf();
  });
  q<HTMLElement>("#load-nonnested").addEventListener("click", () => {
    state.draft = draftFromDocument(nonNestedMarket);
    state.frontier = null;
    refresh();
    void runWhatIf();
  });
  q<HTMLElement>("#add-row").addEventListener("click", () => {
    state.draft.rows.push({ label: "", t: "1", f: "0.5", g: "1", lock: "none" });
    refresh();
  });
  q<HTMLElement>("#solve").addEventListener("click", () => {
    void runFrontier();
    void runWhatIf();
  });
  q<HTMLInputElement>("#slider").addEventListener("input", (event) => {
    const h = Number((event.target as HTMLInputElement).value);
    if (state.frontier) {
      state.frontier = frontierView(
        { entries: state.frontier.entries, t0: 0, budget: 0 },
        h
      );
      renderFrontier();
    }
  });
  q<HTMLElement>("#export").addEventListener("click", () => {
    readDraftInputs();
    const doc = exportDocument(state.draft);
    if (isProblem(doc)) {
      state.notice = doc.message;
      refresh();
      return;
    }
    const blob = new Blob([JSON.stringify(doc, null, 2)], {
      type: "application/json",
    });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "market.json";
    a.click();
  });
  q<HTMLInputElement>("#import-file").addEventListener("change", async (event) => {
    const file = (event.target as HTMLInputElement).files?.[0];
    if (!file) return;
    const parsed: unknown = JSON.parse(await file.text());
    const issues = validateMarketDocument(parsed);
    if (issues.length > 0 || !isValidMarketDocument(parsed)) {
      state.notice = issues
        .map((i) => (i.path ? `${i.path}: ${i.message}` : i.message))
        .join("; ");
      refresh();
      return;
    }
    state.draft = draftFromDocument(parsed);
    refresh();
    void runFrontier();
    void runWhatIf();
  });

  refresh();
  void runFrontier();
  void runWhatIf();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount(document.getElementById("app") as HTMLElement);
}
