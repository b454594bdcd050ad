// Scenario-card store: the single client-side state container. Updates are
// unidirectional (mutate through store methods, listeners re-render); a card's
// config freezes once its job is submitted and edits fork a new card.

import type { EstimationConfigDto, JobDto } from "./types.js";

export interface ScenarioCard {
  id: string;
  label: string;
  config: EstimationConfigDto;
  jobId: string | null;
  job: JobDto | null;
  pinned: boolean;
}

export type Listener = (cards: ScenarioCard[]) => void;

let nextId = 1;

function clone<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

export class ScenarioStore {
  private cards: ScenarioCard[] = [];
  private listeners: Listener[] = [];

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    const snapshot = this.all();
    for (const listener of this.listeners) listener(snapshot);
  }

  all(): ScenarioCard[] {
    return [...this.cards];
  }

  get(cardId: string): ScenarioCard | undefined {
    return this.cards.find((c) => c.id === cardId);
  }

  addCard(label: string, config: EstimationConfigDto): ScenarioCard {
    const card: ScenarioCard = {
      id: `card-${nextId++}`,
      label,
      config: clone(config),
      jobId: null,
      job: null,
      pinned: false,
    };
    this.cards = [...this.cards, card];
    this.emit();
    return card;
  }

  /** Fork a card, preserving the parent config except the edited fields. */
  forkCard(cardId: string, label: string, edits: Partial<EstimationConfigDto>): ScenarioCard {
    const parent = this.get(cardId);
    if (!parent) throw new Error(`unknown card ${cardId}`);
    const config = { ...clone(parent.config), ...clone(edits) } as EstimationConfigDto;
    return this.addCard(label, config);
  }

  /** Edit an unsubmitted card in place; submitted configs are immutable. */
  editConfig(cardId: string, edits: Partial<EstimationConfigDto>): void {
    const card = this.get(cardId);
    if (!card) throw new Error(`unknown card ${cardId}`);
    if (card.jobId !== null) {
      throw new Error("config is immutable once submitted; fork the card instead");
    }
    card.config = { ...clone(card.config), ...clone(edits) } as EstimationConfigDto;
    this.emit();
  }

  markSubmitted(cardId: string, jobId: string): void {
    const card = this.get(cardId);
    if (!card) throw new Error(`unknown card ${cardId}`);
    card.jobId = jobId;
    this.emit();
  }

  updateJob(cardId: string, job: JobDto): void {
    const card = this.get(cardId);
    if (!card) return;
    card.job = job;
    this.emit();
  }

  togglePin(cardId: string): void {
    const card = this.get(cardId);
    if (!card) return;
    card.pinned = !card.pinned;
    this.emit();
  }

  /** Cards whose jobs finished with a result, in creation order. */
  completed(): ScenarioCard[] {
    return this.cards.filter((c) => c.job?.state === "done" && c.job.result !== null);
  }
}

/** The proportion sweep: fork three cards over m in {0.1, 0.2, 0.3}. */
export const SWEEP_PROPORTIONS = [0.1, 0.2, 0.3] as const;

export function sweepProportionCards(store: ScenarioStore, cardId: string): ScenarioCard[] {
  const parent = store.get(cardId);
  if (!parent) throw new Error(`unknown card ${cardId}`);
  return SWEEP_PROPORTIONS.map((m) =>
    store.forkCard(cardId, `${parent.label} (m=${m})`, { m }),
  );
}
