/** Parsing and validation of thermobeam diagnostics CSVs. */

export const DIAGNOSTICS_HEADER = 't,energy,dissipation,balance_residual,f1,lyapunov_g';

export class SchemaError extends Error {}

export interface Curve {
  label: string;
  t: number[];
  energy: number[];
}

/**
 * Parse one diagnostics CSV. The header must match the producer's schema
 * exactly; every data row must carry six finite numbers. Errors name the
 * file and the 1-based line.
 */
export function parseDiagnosticsCsv(text: string, fileName: string, label: string): Curve {
  const lines = text.split(/\r?\n/);
  if (lines.length === 0 || lines[0].trim() === '') {
    throw new SchemaError(`${fileName}:1: empty file`);
  }
  if (lines[0] !== DIAGNOSTICS_HEADER) {
    throw new SchemaError(
      `${fileName}:1: expected header '${DIAGNOSTICS_HEADER}', got '${lines[0]}'`,
    );
  }
  const t: number[] = [];
  const energy: number[] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i];
    if (line.trim() === '') continue; // trailing newline
    const cells = line.split(',');
    if (cells.length !== 6) {
      throw new SchemaError(`${fileName}:${i + 1}: expected 6 columns, got ${cells.length}`);
    }
    const row = cells.map(Number);
    const badIndex = row.findIndex((v) => !Number.isFinite(v));
    if (badIndex >= 0) {
      throw new SchemaError(
        `${fileName}:${i + 1}: column ${badIndex + 1} is not a finite number ` +
        `('${cells[badIndex]}')`,
      );
    }
    t.push(row[0]);
    energy.push(row[1]);
  }
  if (energy.length === 0) {
    throw new SchemaError(`${fileName}: no data rows (empty energy column)`);
  }
  return { label, t, energy };
}
