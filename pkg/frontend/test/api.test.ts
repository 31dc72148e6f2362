import assert from "node:assert/strict";
import { test } from "node:test";

import { ApiClient, ApiError } from "../src/api.js";
import type { Answer } from "../src/types.js";
import { fakeResponse, loadFixture } from "./helpers.js";

const answer = loadFixture<Answer>("ask.json");

test("ask posts the payload and returns the parsed answer", async () => {
  const calls: Array<{ url: string; init?: RequestInit }> = [];
  const client = new ApiClient("http://svc", async (url, init) => {
    calls.push({ url, init });
    return fakeResponse(200, answer);
  });
  const got = await client.ask("fixture-trace-2023", "GRI_302_1", "s3");
  assert.equal(got.question_id, "GRI_302_1");
  assert.equal(calls[0].url, "http://svc/ask");
  const body = JSON.parse(String(calls[0].init?.body));
  assert.deepEqual(body, {
    report_id: "fixture-trace-2023",
    question: "GRI_302_1",
    strategy: "s3",
  });
});

test("service error bodies keep their stable code", async () => {
  const client = new ApiClient("", async () =>
    fakeResponse(404, { error: { code: "REPORT_NOT_FOUND", message: "nope" } }));
  await assert.rejects(
    () => client.ask("ghost", "GRI_302_1"),
    (err: ApiError) => {
      assert.equal(err.code, "REPORT_NOT_FOUND");
      assert.equal(err.retryable, false);
      return true;
    },
  );
});

test("transport failures become retryable UNREACHABLE errors", async () => {
  const client = new ApiClient("", async () => {
    throw new TypeError("fetch failed");
  });
  await assert.rejects(
    () => client.companies(),
    (err: ApiError) => {
      assert.equal(err.code, "UNREACHABLE");
      assert.equal(err.retryable, true);
      return true;
    },
  );
});

test("page text requests are url-encoded", async () => {
  const urls: string[] = [];
  const client = new ApiClient("", async (url) => {
    urls.push(url);
    return fakeResponse(200, { report_id: "a b", page_number: 3, text: "x" });
  });
  await client.pageText("a b", 3);
  assert.equal(urls[0], "/reports/a%20b/pages/3");
});

test("non-json error bodies fall back to the http status code", async () => {
  const client = new ApiClient("", async () =>
    ({
      ok: false,
      status: 502,
      statusText: "Bad Gateway",
      json: async () => {
        throw new SyntaxError("no json");
      },
    }) as unknown as Response);
  await assert.rejects(
    () => client.health(),
    (err: ApiError) => err.code === "HTTP_502",
  );
});
