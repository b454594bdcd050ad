import { describe, expect, it } from "vitest";

import type { EstimationConfigDto } from "../src/types.js";
import { validateConfig } from "../src/validation.js";
import { defaults, parityCases } from "./helpers.js";

describe("validateConfig", () => {
  it("accepts the server defaults", () => {
    expect(validateConfig(defaults()).size).toBe(0);
  });

  it("blocks every config the API rejects, on the same field", () => {
    // shared fixture: the Python service test asserts the API 400s each of
    // these overlays naming `field`; here the form validator must pre-block
    // the identical field
    const cases = parityCases();
    expect(cases.length).toBeGreaterThanOrEqual(10);
    for (const { overlay, field } of cases) {
      const config = { ...defaults(), ...overlay } as EstimationConfigDto;
      const errors = validateConfig(config);
      expect(errors.has(field), `overlay ${JSON.stringify(overlay)} should flag ${field}`).toBe(true);
    }
  });

  it("requires covariates only for ppcca", () => {
    const ppcca = defaults();
    ppcca.model = { kind: "ppcca", q: 2, n_covariates: 0 };
    expect(validateConfig(ppcca).has("model.n_covariates")).toBe(true);
    ppcca.model.n_covariates = 2;
    expect(validateConfig(ppcca).size).toBe(0);

    const ppca = defaults();
    ppca.model = { kind: "ppca", q: 2, n_covariates: 1 };
    expect(validateConfig(ppca).has("model.n_covariates")).toBe(true);
  });

  it("handles unequal group ratios", () => {
    const config = defaults();
    config.group_ratio = [2, 1];
    config.n_min = 6;
    config.grid_step = 3;
    expect(validateConfig(config).size).toBe(0);
    config.grid_step = 2;
    expect(validateConfig(config).has("grid_step")).toBe(true);
  });
});
