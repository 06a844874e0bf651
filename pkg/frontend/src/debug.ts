// Hidden debug table: verbatim response bodies keyed by endpoint, for
// byte-level diffing against CLI output.  Nothing is reformatted.

export class DebugTable {
  private rows = new Map<string, string>();

  record(endpoint: string, rawBody: string): void {
    this.rows.set(endpoint, rawBody);
  }

  get(endpoint: string): string | undefined {
    return this.rows.get(endpoint);
  }

  entries(): [string, string][] {
    return [...this.rows.entries()].sort((a, b) =>
      a[0] < b[0] ? -1 : a[0] > b[0] ? 1 : 0,
    );
  }

  /** Plain-text dump: one line per endpoint, raw bytes untouched. */
  dump(): string {
    return this.entries()
      .map(([k, v]) => `${k}\t${v}`)
      .join("\n");
  }

  toTableElement(doc: Document): HTMLTableElement {
    const table = doc.createElement("table");
    table.id = "debug-table";
    table.style.display = "none";
    for (const [endpoint, body] of this.entries()) {
      const tr = doc.createElement("tr");
      const th = doc.createElement("th");
      th.textContent = endpoint;
      const td = doc.createElement("td");
      td.textContent = body;
      tr.append(th, td);
      table.append(tr);
    }
    return table;
  }
}
