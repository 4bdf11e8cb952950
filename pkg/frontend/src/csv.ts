import Papa from "papaparse";

export const DATASET_HEADER = [
  "word_labels",
  "keywords",
  "source",
  "sentence_anonymized",
] as const;

export const METADATA_HEADER = ["word_labels", "keywords", "source", "doc_id"] as const;

export interface DatasetRow {
  word_labels: string;
  keywords: string;
  source: string;
  sentence_anonymized: string;
}

/** Parse the pipeline's 4-column dataset CSV. The header must match exactly,
 * in order; anything else is a sign the file is not a dataset export. */
export function parseDatasetCsv(text: string): DatasetRow[] {
  const parsed = Papa.parse<DatasetRow>(text, {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`dataset csv: ${first.message} (row ${first.row ?? "?"})`);
  }
  const fields = parsed.meta.fields ?? [];
  if (fields.join(",") !== DATASET_HEADER.join(",")) {
    throw new Error(
      `dataset csv: expected header ${DATASET_HEADER.join(",")}, got ${fields.join(",")}`,
    );
  }
  return parsed.data;
}

/** Metadata for the export directory: the dataset rows minus their text,
 * plus a doc_id giving each row's 0-based position. Row i here lines up
 * with row i of every exported array. */
export function metadataCsv(rows: DatasetRow[]): string {
  const data = rows.map((row, i) => [row.word_labels, row.keywords, row.source, String(i)]);
  return Papa.unparse({ fields: [...METADATA_HEADER], data }, { newline: "\r\n" }) + "\r\n";
}
