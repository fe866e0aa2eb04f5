import { describe, expect, it } from "vitest";

import { ApiError, TutorApi } from "../src/api";
import fixtures from "./fixtures/service.json";

interface Call {
  url: string;
  init?: RequestInit;
}

function fakeFetch(status: number, body: unknown) {
  const calls: Call[] = [];
  const fn = async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { fn, calls };
}

describe("TutorApi", () => {
  it("fetches the questionnaire", async () => {
    const { fn, calls } = fakeFetch(200, fixtures.questionnaire);
    const api = new TutorApi(fn);
    const form = await api.getQuestionnaire();
    expect(calls[0]!.url).toBe("/questionnaire");
    expect(form.items).toHaveLength(20);
  });

  it("posts session creation as JSON", async () => {
    const { fn, calls } = fakeFetch(201, fixtures.created_env3);
    const api = new TutorApi(fn);
    const env = await api.createSession({ q01: 1 }, "Env3");
    expect(env.id).toBe(fixtures.created_env3.id);
    const init = calls[0]!.init!;
    expect(init.method).toBe("POST");
    expect((init.headers as Record<string, string>)["Content-Type"]).toBe("application/json");
    expect(JSON.parse(init.body as string)).toEqual({ answers: { q01: 1 }, mode: "Env3" });
  });

  it("posts actions to the session's action route", async () => {
    const { fn, calls } = fakeFetch(200, fixtures.after_correct_env3);
    const api = new TutorApi(fn);
    await api.sendAction("abc", { type: "Think", rt: 2.5 });
    expect(calls[0]!.url).toBe("/sessions/abc/actions");
  });

  it("surfaces the service's error detail with its status", async () => {
    const { fn } = fakeFetch(fixtures.conflict_status, fixtures.conflict_body);
    const api = new TutorApi(fn);
    const err = await api.sendAction("x", { type: "Think", rt: 1 }).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.message).toMatch(/closed/);
  });

  it("falls back to the status text for non-JSON errors", async () => {
    const api = new TutorApi(async () => new Response("boom", { status: 500, statusText: "Server Error" }));
    const err = await api.getQuestionnaire().catch((e) => e);
    expect(err.status).toBe(500);
    expect(err.message).toBe("Server Error");
  });

  it("wraps network failures as status 0", async () => {
    const api = new TutorApi(async () => {
      throw new TypeError("fetch failed");
    });
    const err = await api.getQuestionnaire().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(0);
  });

  it("builds the log link from the base", async () => {
    expect(new TutorApi(undefined, "http://h:1").logUrl("s1")).toBe("http://h:1/sessions/s1/log");
    expect(new TutorApi().logUrl("s1")).toBe("/sessions/s1/log");
  });
});
