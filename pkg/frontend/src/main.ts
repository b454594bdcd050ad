// App bootstrap: fetch defaults, wire the form, the scenario list, the curve
// view and the comparison panel to the store, and poll running jobs.

import { createApiClient } from "./api.js";
import { renderComparePanel } from "./compare.js";
import { renderCurveView } from "./curve.js";
import { buildConfigForm } from "./form.js";
import { pollJob } from "./poll.js";
import type { PollHandle } from "./poll.js";
import type { ScenarioCard } from "./store.js";
import { ScenarioStore, sweepProportionCards } from "./store.js";

const POLL_INTERVAL_MS = 1000;

export async function bootstrap(root: HTMLElement): Promise<void> {
  const api = createApiClient("");
  const store = new ScenarioStore();
  const pollers = new Map<string, PollHandle>();
  let selectedCardId: string | null = null;

  root.textContent = "";
  const layout = document.createElement("div");
  layout.className = "layout";
  const sidebar = document.createElement("div");
  sidebar.className = "sidebar";
  const mainPane = document.createElement("div");
  mainPane.className = "main-pane";
  layout.appendChild(sidebar);
  layout.appendChild(mainPane);
  root.appendChild(layout);

  const formHost = document.createElement("section");
  formHost.className = "form-host";
  const listHost = document.createElement("section");
  listHost.className = "scenario-list";
  sidebar.appendChild(formHost);
  sidebar.appendChild(listHost);

  const curveHost = document.createElement("section");
  curveHost.className = "curve-host";
  const compareHost = document.createElement("section");
  compareHost.className = "compare-host";
  mainPane.appendChild(curveHost);
  mainPane.appendChild(compareHost);

  const defaults = await api.fetchDefaults();

  const launch = async (card: ScenarioCard) => {
    try {
      const jobId = await api.submitJob(card.config);
      store.markSubmitted(card.id, jobId);
      const handle = pollJob(
        api,
        jobId,
        (job) => store.updateJob(card.id, job),
        (error) => console.error("poll failed", error),
        POLL_INTERVAL_MS,
      );
      pollers.set(card.id, handle);
    } catch (error) {
      console.error("submit failed", error);
    }
  };

  const form = buildConfigForm(defaults, api, (config) => {
    const label = `${config.model.kind} p=${config.p} m=${config.m}`;
    const card = store.addCard(label, config);
    selectedCardId = card.id;
    void launch(card);
  });
  formHost.appendChild(form.element);

  const renderList = (cards: ScenarioCard[]) => {
    listHost.textContent = "";
    for (const card of cards) {
      const item = document.createElement("div");
      item.className = "scenario-item";
      if (card.id === selectedCardId) item.classList.add("selected");
      const state = card.job?.state ?? (card.jobId ? "queued" : "draft");
      item.textContent = `${card.label} [${state}]`;
      item.addEventListener("click", () => {
        selectedCardId = card.id;
        rerender(store.all());
      });
      listHost.appendChild(item);
    }
  };

  const rerender = (cards: ScenarioCard[]) => {
    renderList(cards);
    const selected = cards.find((c) => c.id === selectedCardId) ?? null;
    renderCurveView(
      curveHost,
      selected?.job ?? null,
      selected?.config.target_fdr ?? defaults.target_fdr,
    );
    renderComparePanel(compareHost, cards, (cardId) => {
      for (const fork of sweepProportionCards(store, cardId)) void launch(fork);
    });
  };

  store.subscribe(rerender);
  rerender(store.all());
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void bootstrap(document.getElementById("app")!);
}
