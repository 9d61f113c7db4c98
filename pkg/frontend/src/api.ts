/** Typed client for the alignment service HTTP/JSON API. */

export interface DocumentSummary {
  doc_id: string;
  duration: number;
  n_words: number;
  n_markers: number;
  completion: Record<string, number>;
}

export interface AlignmentDoc {
  id: string;
  words: string[];
  silence_markers: number[];
  audio_ref: string;
  duration: number;
}

export interface Mark {
  doc_id: string;
  annotator_id: string;
  silence_index: number;
  word_index: number | null; // null = skip (pause added no words)
  created_at?: string;
}

/** Server said no (4xx): the request itself arrived fine. */
export class ApiRejection extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
    this.name = "ApiRejection";
  }
}

export class AlignApi {
  constructor(private baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.baseUrl + path, init);
    if (!res.ok) {
      let detail = `${res.status}`;
      try {
        const body = await res.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiRejection(res.status, detail);
    }
    return (await res.json()) as T;
  }

  listDocuments(annotator?: string): Promise<DocumentSummary[]> {
    const query = annotator ? `?annotator=${encodeURIComponent(annotator)}` : "";
    return this.request(`/documents${query}`);
  }

  getDocument(docId: string): Promise<AlignmentDoc> {
    return this.request(`/documents/${encodeURIComponent(docId)}`);
  }

  async getMarks(docId: string, annotator: string): Promise<Mark[]> {
    const body = await this.request<{ marks: Mark[] }>(
      `/marks?doc=${encodeURIComponent(docId)}&annotator=${encodeURIComponent(annotator)}`,
    );
    return body.marks;
  }

  async submitMark(mark: Mark): Promise<Mark> {
    const body = await this.request<{ status: string; mark: Mark }>("/marks", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(mark),
    });
    return body.mark;
  }

  audioUrl(docId: string): string {
    return `${this.baseUrl}/audio/${encodeURIComponent(docId)}.wav`;
  }
}
