import type { ActionBody, Mode, Questionnaire, SessionEnvelope } from "./types.js";

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.status = status;
  }
}

async function fail(response: Response): Promise<never> {
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, detail);
}

export class TutorApi {
  private readonly fetchFn: FetchLike;
  private readonly base: string;

  constructor(fetchFn?: FetchLike, base = "") {
    // bind so a bare window.fetch keeps its receiver
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
    this.base = base;
  }

  private async get<T>(path: string): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.base + path);
    } catch (err) {
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
    if (!response.ok) await fail(response);
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.base + path, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
    if (!response.ok) await fail(response);
    return (await response.json()) as T;
  }

  getQuestionnaire(): Promise<Questionnaire> {
    return this.get("/questionnaire");
  }

  createSession(answers: Record<string, number>, mode: Mode): Promise<SessionEnvelope> {
    return this.post("/sessions", { answers, mode });
  }

  getSession(id: string): Promise<SessionEnvelope> {
    return this.get(`/sessions/${id}`);
  }

  sendAction(id: string, action: ActionBody): Promise<SessionEnvelope> {
    return this.post(`/sessions/${id}/actions`, action);
  }

  logUrl(id: string): string {
    return `${this.base}/sessions/${id}/log`;
  }
}
