// Browser entry point: wires the pure view-state logic to the DOM.

import { ApiError, Client } from "./api.js";
import {
  ViewState,
  comboKey,
  createViewState,
  emptyDraft,
  expandNode,
  expandedContent,
  findLayer,
  layersByComplexity,
  buildSubmission,
  removedAtLayer,
  selectLayer,
  toggleFootnotes,
  validateDraft,
  RatingDraft,
} from "./state.js";
import type { LayerView, MoreInfoAnswer, PageDoc } from "./types.js";

const api = new Client(
  (window as unknown as { TRACELENS_API?: string }).TRACELENS_API ?? "http://127.0.0.1:8787",
);

const root = document.getElementById("app") as HTMLElement;

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function banner(message: string, retry?: () => void): HTMLElement {
  const box = el("div", "banner", message);
  if (retry) {
    const button = el("button", "", "Retry") as HTMLButtonElement;
    button.onclick = retry;
    box.appendChild(button);
  }
  return box;
}

async function showIndex(): Promise<void> {
  root.replaceChildren(el("p", "", "Loading explanations..."));
  try {
    const entries = await api.listExplanations();
    const list = el("ul", "explanations");
    for (const entry of entries) {
      const item = el("li");
      const link = el("a", "", `${entry.scenario} (${entry.domain})`) as HTMLAnchorElement;
      link.href = "#";
      link.onclick = (event) => {
        event.preventDefault();
        void showExplanation(entry.id);
      };
      item.appendChild(link);
      list.appendChild(item);
    }
    root.replaceChildren(el("h1", "", "Explanations"), list);
  } catch (error) {
    root.replaceChildren(banner(`Could not reach the service: ${error}`, () => void showIndex()));
  }
}

async function showExplanation(id: string): Promise<void> {
  try {
    const doc = await api.getExplanation(id);
    renderExplanation(createViewState(doc));
  } catch (error) {
    if (error instanceof ApiError && error.status === 404) {
      root.replaceChildren(banner(`No explanation named ${id}.`));
    } else {
      root.replaceChildren(
        banner(`Could not load ${id}: ${error}`, () => void showExplanation(id)),
      );
    }
  }
}

function layerLabel(layer: LayerView): string {
  return `${comboKey(layer.combo)} (${layer.cause_count} causes)`;
}

function renderExplanation(state: ViewState): void {
  const doc = state.doc;
  const header = el("div", "header");
  header.appendChild(el("h1", "", `${doc.scenario} (${doc.domain})`));
  header.appendChild(el("p", "prediction", `Prediction: ${doc.conclusion_text}`));

  const selector = el("div", "layer-selector");
  for (const layer of layersByComplexity(doc)) {
    const key = comboKey(layer.combo);
    const button = el(
      "button",
      key === state.activeCombo ? "active" : "",
      layerLabel(layer),
    ) as HTMLButtonElement;
    button.onclick = () => renderExplanation(selectLayer(state, key));
    selector.appendChild(button);
  }

  const active = findLayer(doc, state.activeCombo);
  const body = el("div", "sentences");
  for (const sentence of active.sentences) {
    body.appendChild(el("p", `sentence ${sentence.kind}`, sentence.text));
  }

  const removed = removedAtLayer(doc, state.activeCombo);
  const removedBox = el("div", "removed");
  if (removed.sentences.length > 0) {
    removedBox.appendChild(
      el("p", "removed-title", `${removed.sentences.length} statement(s) removed at this layer`),
    );
    for (const sentence of removed.sentences) {
      const shown = expandedContent(state).some((s) => s.node === sentence.node);
      if (shown) {
        removedBox.appendChild(el("p", "sentence removed-content", sentence.text));
      } else {
        const button = el("button", "expand", "Show removed statement") as HTMLButtonElement;
        button.onclick = () => renderExplanation(expandNode(state, sentence.node));
        removedBox.appendChild(button);
      }
    }
  }

  const footnotesBox = el("div", "footnotes");
  const toggle = el(
    "button",
    "",
    state.footnotesVisible ? "Hide footnotes" : "Show footnotes",
  ) as HTMLButtonElement;
  toggle.onclick = () => renderExplanation(toggleFootnotes(state));
  if (active.footnotes.length > 0) {
    footnotesBox.appendChild(toggle);
  }
  if (state.footnotesVisible) {
    for (const footnote of active.footnotes) {
      footnotesBox.appendChild(
        el("p", "footnote", `[${footnote.marker}] ${footnote.rule}: ${footnote.definition}`),
      );
    }
  }

  const back = el("button", "", "All explanations") as HTMLButtonElement;
  back.onclick = () => void showIndex();

  root.replaceChildren(back, header, selector, body, removedBox, footnotesBox);
}

// --- study page (compare mode) --------------------------------------------

function likertRow(
  question: string,
  onChange: (column: 0 | 1, value: number) => void,
): HTMLElement {
  const row = el("div", "likert-row");
  row.appendChild(el("p", "", question));
  (["Explanation 1", "Explanation 2"] as const).forEach((label, column) => {
    const group = el("span", "scale", `${label}: `);
    for (let value = 1; value <= 7; value += 1) {
      const button = el("button", "scale-point", String(value)) as HTMLButtonElement;
      button.onclick = () => {
        onChange(column as 0 | 1, value);
        group.querySelectorAll("button").forEach((b) => b.classList.remove("chosen"));
        button.classList.add("chosen");
      };
      group.appendChild(button);
    }
    row.appendChild(group);
  });
  return row;
}

export async function showPage(pageId: string, participant: string): Promise<void> {
  let page: PageDoc;
  try {
    page = await api.getPage(pageId);
  } catch (error) {
    root.replaceChildren(banner(`Could not load page ${pageId}: ${error}`));
    return;
  }
  const draft: RatingDraft = emptyDraft();
  let locked = false;

  const container = el("div", "study-page");
  container.appendChild(el("h1", "", `Prediction: ${page.conclusion_text}`));
  const sideBySide = el("div", "columns");
  const leftBox = el("div", "column");
  leftBox.appendChild(el("h2", "", "Explanation 1"));
  for (const sentence of page.left.sentences) {
    leftBox.appendChild(el("p", "sentence", sentence.text));
  }
  for (const footnote of page.left.footnotes) {
    leftBox.appendChild(el("p", "footnote", `[${footnote.marker}] ${footnote.definition}`));
  }
  const rightBox = el("div", "column");
  rightBox.appendChild(el("h2", "", "Explanation 2"));
  for (const sentence of page.right.sentences) {
    rightBox.appendChild(el("p", "sentence", sentence.text));
  }
  for (const footnote of page.right.footnotes) {
    rightBox.appendChild(el("p", "footnote", `[${footnote.marker}] ${footnote.definition}`));
  }
  sideBySide.append(leftBox, rightBox);
  container.appendChild(sideBySide);

  const form = el("div", "rating-form");
  page.questions
    .filter((q) => q.kind === "likert")
    .forEach((q, index) => {
      form.appendChild(
        likertRow(q.text, (column, value) => {
          draft.likert[index][column] = value;
        }),
      );
    });

  const moreInfo = page.questions.find((q) => q.kind === "more_info");
  if (moreInfo) {
    const row = el("div", "more-info");
    row.appendChild(el("p", "", moreInfo.text));
    for (const option of moreInfo.options ?? []) {
      const button = el("button", "", option) as HTMLButtonElement;
      button.onclick = () => {
        draft.moreInfo = option as MoreInfoAnswer;
      };
      row.appendChild(button);
    }
    form.appendChild(row);
  }

  const [feedbackPrompt, justificationPrompt] = page.questions.filter(
    (q) => q.kind === "free_text",
  );
  const feedback = el("textarea") as HTMLTextAreaElement;
  feedback.placeholder = feedbackPrompt?.text ?? "Feedback";
  feedback.oninput = () => {
    draft.feedback = feedback.value;
  };
  const justification = el("textarea") as HTMLTextAreaElement;
  justification.placeholder = justificationPrompt?.text ?? "Justification (required)";
  justification.oninput = () => {
    draft.justification = justification.value;
  };
  form.append(feedback, justification);

  const problems = el("p", "problems");
  const submit = el("button", "submit", "Submit ratings") as HTMLButtonElement;
  submit.onclick = async () => {
    if (locked) {
      return;
    }
    const issues = validateDraft(draft);
    if (issues.length > 0) {
      problems.textContent = issues.join(" / ");
      return;
    }
    try {
      await api.submitRating(buildSubmission(participant, page, draft));
      locked = true;
      submit.disabled = true;
      problems.textContent = "Recorded. This page is now locked.";
    } catch (error) {
      problems.textContent =
        error instanceof ApiError ? error.body : `Submission failed: ${error}`;
    }
  };
  form.append(problems, submit);
  container.appendChild(form);
  root.replaceChildren(container);
}

void showIndex();
