import type {
  EpisodeRef,
  MeasureInfo,
  SharedTheme,
  SimilarEntry,
  SimilarResponse,
} from "./types.js";
import type { Status } from "./state.js";

// Chip palette keyed by top-level theme domain; unknown domains render gray.
export const DOMAIN_CLASSES: Record<string, string> = {
  "the human condition": "chip-red",
  society: "chip-green",
  "the pursuit of knowledge": "chip-blue",
  "alternate reality": "chip-yellow",
};

export function chipClass(domain: string): string {
  return DOMAIN_CLASSES[domain] ?? "chip-gray";
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** Scores always show the six decimal places the API serializes. */
export function formatScore(score: number): string {
  return score.toFixed(6);
}

export function renderEpisodeOptions(
  items: EpisodeRef[],
  selected: string | null,
): string {
  return items
    .map((e) => {
      const marker = e.item_id === selected ? " selected" : "";
      return (
        `<option value="${escapeHtml(e.item_id)}"${marker}>` +
        `${escapeHtml(e.title)} (${escapeHtml(e.item_id)})</option>`
      );
    })
    .join("");
}

export function renderMeasureOptions(
  measures: MeasureInfo[],
  selected: string,
): string {
  return measures
    .map((m) => {
      const marker = m.token === selected ? " selected" : "";
      return (
        `<option value="${escapeHtml(m.token)}"${marker}>` +
        `${escapeHtml(m.label)}</option>`
      );
    })
    .join("");
}

export function renderSoftnessControl(
  info: MeasureInfo | null,
  value: number | null,
): string {
  if (!info || !info.takes_p || value === null) return "";
  const min = info.p_min ?? 0.1;
  const max = info.p_max ?? 20;
  const step = info.p_integer ? 1 : 0.1;
  const label = info.family === "text" ? "rank" : "softness p";
  return (
    `<label>${label} <input id="softness" type="number" ` +
    `min="${min}" max="${max}" step="${step}" value="${value}"></label>`
  );
}

function renderChips(themes: SharedTheme[]): string {
  if (themes.length === 0) return `<span class="muted">none</span>`;
  return themes
    .map(
      (t) =>
        `<span class="chip ${chipClass(t.domain)}" title="${escapeHtml(t.domain)}">` +
        `${escapeHtml(t.name)}</span>`,
    )
    .join("");
}

function renderResultRow(entry: SimilarEntry): string {
  return (
    `<tr data-item="${escapeHtml(entry.item_id)}">` +
    `<td class="num">${entry.rank}</td>` +
    `<td>${escapeHtml(entry.title)} <span class="muted">(${escapeHtml(entry.item_id)})</span></td>` +
    `<td>${escapeHtml(entry.series)}</td>` +
    `<td class="num score">${formatScore(entry.score)}</td>` +
    `<td class="chips">${renderChips(entry.shared_themes)}</td>` +
    `</tr>`
  );
}

export function renderResults(response: SimilarResponse | null): string {
  if (!response) {
    return `<p class="hint">Pick an episode to see its nearest neighbors.</p>`;
  }
  if (response.results.length === 0) {
    return `<p class="hint">No neighbors with positive similarity.</p>`;
  }
  const rows = response.results.map(renderResultRow).join("");
  return (
    `<table><thead><tr>` +
    `<th>#</th><th>Episode</th><th>Series</th><th>Score</th><th>Shared themes</th>` +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
}

export function renderBanner(status: Status, error: string | null): string {
  if (status === "loading") {
    return `<div class="banner loading">Querying the service...</div>`;
  }
  if (status === "error") {
    return (
      `<div class="banner error">${escapeHtml(error ?? "request failed")} ` +
      `<button type="button" data-action="retry">Retry</button></div>`
    );
  }
  return "";
}
