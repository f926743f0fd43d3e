// Wire types mirroring the serve endpoints' JSON documents.

export interface SentenceView {
  node: string;
  kind: "told" | "background" | "inferred";
  text: string;
}

export interface FootnoteView {
  marker: number;
  rule: string;
  definition: string;
}

export interface LayerView {
  combo: string[];
  cause_count: number;
  rule_count: number;
  sentences: SentenceView[];
  footnotes: FootnoteView[];
}

export interface ExplanationDoc {
  scenario: string;
  domain: string;
  conclusion_text: string;
  layers: LayerView[];
}

export interface ExplanationSummary {
  id: string;
  scenario: string;
  domain: string;
}

export interface PageQuestion {
  kind: "likert" | "more_info" | "free_text";
  text: string;
  options?: string[];
}

export interface PageDoc {
  id: string;
  scenario: string;
  domain: string;
  conclusion_text: string;
  pair: { label: string; left: string[]; right: string[]; set: string };
  questions: PageQuestion[];
  left: LayerView;
  right: LayerView;
}

export type MoreInfoAnswer = "yes" | "no" | "idk";

/** One Likert item: [rating of Explanation 1, rating of Explanation 2]. */
export type LikertPair = [number, number];

export interface RatingSubmission {
  participant: string;
  page: string;
  q1: LikertPair;
  q2: LikertPair;
  q3: LikertPair;
  q4: LikertPair;
  q5: LikertPair;
  more_info: MoreInfoAnswer;
  feedback: string;
  justification: string;
}
