// Parser for the trace CSV the service serves at /api/trace:
// '# key: json' metadata lines, then a header-driven column block.

import type { Sample } from "./types.js";

export interface ParsedTrace {
  samples: Sample[];
  metadata: Record<string, unknown>;
}

const COLUMNS = ["time_s", "position_mm", "delta_L_um", "theta_deg", "i1", "i2"] as const;

export class TraceParseError extends Error {
  constructor(message: string, public readonly line: number) {
    super(`line ${line}: ${message}`);
  }
}

export function parseTraceCsv(text: string): ParsedTrace {
  const metadata: Record<string, unknown> = {};
  const samples: Sample[] = [];
  let header: string[] | null = null;
  const lines = text.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const lineNo = i + 1;
    const line = (lines[i] ?? "").trim();
    if (line === "") continue;
    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      const sep = body.indexOf(":");
      if (sep < 0) throw new TraceParseError(`metadata line without key: ${line}`, lineNo);
      const key = body.slice(0, sep).trim();
      const raw = body.slice(sep + 1).trim();
      try {
        metadata[key] = JSON.parse(raw);
      } catch {
        throw new TraceParseError(`bad JSON in metadata '${key}'`, lineNo);
      }
      continue;
    }
    const cells = line.split(",").map((c) => c.trim());
    if (header === null) {
      header = cells;
      for (const col of COLUMNS) {
        if (!header.includes(col)) throw new TraceParseError(`missing column ${col}`, lineNo);
      }
      continue;
    }
    if (cells.length !== header.length) {
      throw new TraceParseError(
        `expected ${header.length} cells, found ${cells.length}`,
        lineNo,
      );
    }
    const row: Partial<Record<string, number>> = {};
    for (let j = 0; j < header.length; j++) {
      const value = Number(cells[j]);
      if (!Number.isFinite(value)) {
        throw new TraceParseError(`bad numeric value '${cells[j]}'`, lineNo);
      }
      row[header[j] as string] = value;
    }
    samples.push({
      time_s: row.time_s as number,
      position_mm: row.position_mm as number,
      delta_L_um: row.delta_L_um as number,
      theta_deg: row.theta_deg as number,
      i1: row.i1 as number,
      i2: row.i2 as number,
    });
  }
  if (header === null) throw new TraceParseError("no column header found", lines.length);
  return { samples, metadata };
}
