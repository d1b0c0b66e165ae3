import { describe, expect, it } from "vitest";
import {
  chipClass,
  escapeHtml,
  formatScore,
  renderBanner,
  renderEpisodeOptions,
  renderMeasureOptions,
  renderResults,
  renderSoftnessControl,
} from "../src/render.js";
import type { MeasureInfo, SimilarResponse } from "../src/types.js";

describe("chip colors", () => {
  it("maps each theme domain to its color", () => {
    expect(chipClass("the human condition")).toBe("chip-red");
    expect(chipClass("society")).toBe("chip-green");
    expect(chipClass("the pursuit of knowledge")).toBe("chip-blue");
    expect(chipClass("alternate reality")).toBe("chip-yellow");
  });

  it("falls back to gray for anything else", () => {
    expect(chipClass("the mirror universe")).toBe("chip-gray");
  });
});

describe("score formatting", () => {
  it("always shows six decimal places", () => {
    expect(formatScore(0.894427)).toBe("0.894427");
    expect(formatScore(0.5)).toBe("0.500000");
    expect(formatScore(1)).toBe("1.000000");
  });

  it("round-trips values already quantized to six decimals", () => {
    // The API serializes scores at six-decimal precision; rendering the
    // parsed number at the same precision must reproduce those bytes.
    const samples = [0.514349, 0.123457, 0.000001, 0.999999, 0.25, 1];
    for (const value of samples) {
      expect(Number(formatScore(value))).toBe(value);
    }
    let x = 0.0;
    for (let n = 0; n < 5000; n++) {
      x = (x * 9301 + 49297) % 233280;
      const quantized = Number((x / 233280).toFixed(6));
      expect(formatScore(quantized)).toBe(quantized.toFixed(6));
      expect(Number(formatScore(quantized))).toBe(quantized);
    }
  });
});

describe("escapeHtml", () => {
  it("neutralizes markup characters", () => {
    expect(escapeHtml(`<b>&"q"</b>`)).toBe("&lt;b&gt;&amp;&quot;q&quot;&lt;/b&gt;");
  });
});

const ANCHOR_RESPONSE: SimilarResponse = {
  query_item: "voy3x05",
  measure: "cosidf",
  level: "central",
  results: [
    {
      rank: 1,
      item_id: "tng4x13",
      title: "Devil's Due",
      series: "TNG",
      score: 0.514349,
      shared_themes: [
        { name: "avarice", domain: "the human condition" },
        { name: "exploitation of sentient beings", domain: "society" },
        { name: "fraud", domain: "society" },
        { name: "religion as a control mechanism", domain: "society" },
        { name: "the fulfillment of prophesy", domain: "alternate reality" },
        { name: "the lust for gold", domain: "the human condition" },
      ],
    },
    {
      rank: 2,
      item_id: "tos1x04",
      title: "A <Test> & Title",
      series: "TOS",
      score: 0.25,
      shared_themes: [],
    },
  ],
};

describe("results table", () => {
  it("prompts for a selection before any query ran", () => {
    expect(renderResults(null)).toContain("Pick an episode");
  });

  it("says so when nothing shares positive similarity", () => {
    const empty = { ...ANCHOR_RESPONSE, results: [] };
    expect(renderResults(empty)).toContain("No neighbors");
  });

  it("renders rank, episode, series, score, and theme chips in API order", () => {
    const html = renderResults(ANCHOR_RESPONSE);
    expect(html).toContain(`data-item="tng4x13"`);
    expect(html).toContain("Devil&#39;s Due".replace("&#39;", "'"));
    expect(html).toContain("TNG");
    expect(html).toContain("0.514349");
    expect(html).toContain("0.250000");
    expect(html.indexOf("tng4x13")).toBeLessThan(html.indexOf("tos1x04"));
    expect(html).toContain(`class="chip chip-red"`);
    expect(html).toContain(`class="chip chip-green"`);
    expect(html).toContain(`class="chip chip-yellow"`);
    expect((html.match(/class="chip /g) ?? []).length).toBe(6);
  });

  it("escapes titles before they reach the DOM", () => {
    const html = renderResults(ANCHOR_RESPONSE);
    expect(html).toContain("A &lt;Test&gt; &amp; Title");
    expect(html).not.toContain("<Test>");
  });
});

describe("control fragments", () => {
  it("marks the selected episode option", () => {
    const html = renderEpisodeOptions(
      [
        { item_id: "voy3x05", title: "False Profits", series: "VOY", season: 3, episode: 5 },
        { item_id: "tng4x13", title: "Devil's Due", series: "TNG", season: 4, episode: 13 },
      ],
      "tng4x13",
    );
    expect(html).toContain(`value="tng4x13" selected`);
    expect(html).not.toContain(`value="voy3x05" selected`);
  });

  it("lists measures by label", () => {
    const html = renderMeasureOptions(
      [
        { token: "cosidf", family: "set", label: "Cosine (IDF-weighted)", takes_p: false, takes_level: true },
        { token: "cf", family: "cf", label: "Rating co-occurrence (Pearson)", takes_p: false, takes_level: false },
      ],
      "cf",
    );
    expect(html).toContain("Cosine (IDF-weighted)");
    expect(html).toContain(`value="cf" selected`);
  });

  it("renders a softness input only for measures that take p", () => {
    const lch: MeasureInfo = {
      token: "lch", family: "ontology", label: "LCH (soft cosine)",
      takes_p: true, takes_level: true, p_default: 4, p_min: 0.1, p_max: 20,
    };
    const html = renderSoftnessControl(lch, 4);
    expect(html).toContain(`id="softness"`);
    expect(html).toContain(`value="4"`);
    expect(html).toContain(`min="0.1"`);
    expect(html).toContain(`max="20"`);
    expect(html).toContain("softness p");
    expect(renderSoftnessControl(null, 4)).toBe("");
    const cf: MeasureInfo = {
      token: "cf", family: "cf", label: "CF", takes_p: false, takes_level: false,
    };
    expect(renderSoftnessControl(cf, 4)).toBe("");
  });

  it("labels the latent-factor control as a rank with integer steps", () => {
    const lsi: MeasureInfo = {
      token: "lsi:40", family: "text", label: "Transcript LSI cosine",
      takes_p: true, takes_level: false, p_default: 40,
      p_min: 1, p_max: 452, p_integer: true,
    };
    const html = renderSoftnessControl(lsi, 40);
    expect(html).toContain("rank");
    expect(html).toContain(`step="1"`);
  });
});

describe("status banner", () => {
  it("is empty while idle", () => {
    expect(renderBanner("idle", null)).toBe("");
    expect(renderBanner("ready", null)).toBe("");
  });

  it("announces in-flight queries", () => {
    expect(renderBanner("loading", null)).toContain("Querying");
  });

  it("shows the failure and offers a retry", () => {
    const html = renderBanner("error", "caches are still building");
    expect(html).toContain("caches are still building");
    expect(html).toContain(`data-action="retry"`);
  });
});
