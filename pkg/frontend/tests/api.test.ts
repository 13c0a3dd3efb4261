import { afterEach, describe, expect, it, vi } from "vitest";

import { api, ApiError } from "../src/api.js";

function stubFetch(status: number, body: unknown) {
  const mock = vi.fn(async () => ({
    ok: status >= 200 && status < 300,
    status,
    statusText: `status ${status}`,
    json: async () => body,
  }));
  vi.stubGlobal("fetch", mock);
  return mock;
}

afterEach(() => vi.unstubAllGlobals());

describe("api client", () => {
  it("lists scenarios", async () => {
    stubFetch(200, { scenarios: ["lab4", "lab6"] });
    expect(await api.scenarios()).toEqual(["lab4", "lab6"]);
  });

  it("posts run requests as json", async () => {
    const mock = stubFetch(202, {
      id: "run-0001",
      state: "queued",
      request: {},
      progress: { steps_completed: 0, estimated_steps: 0 },
      error: null,
    });
    const handle = await api.startRun({
      scenario: "lab6",
      policy: "esascf",
      mode: "PT",
      seed: 3,
    });
    expect(handle.id).toBe("run-0001");
    const [url, init] = mock.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("/runs");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body as string).scenario).toBe("lab6");
  });

  it("raises ApiError with the server detail", async () => {
    stubFetch(409, { detail: "another run is using the expertise store" });
    await expect(
      api.decide("r000001", "approve", "console"),
    ).rejects.toMatchObject({
      status: 409,
      detail: "another run is using the expertise store",
    });
  });

  it("wraps non-json failures too", async () => {
    const mock = vi.fn(async () => ({
      ok: false,
      status: 502,
      statusText: "Bad Gateway",
      json: async () => {
        throw new Error("not json");
      },
    }));
    vi.stubGlobal("fetch", mock);
    await expect(api.summary()).rejects.toBeInstanceOf(ApiError);
  });
});
