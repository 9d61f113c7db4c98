/**
 * Browser entry point.  Query parameters:
 *   ?doc=<id>&annotator=<id>[&api=<base-url>]
 * Without ?doc it lists the annotator's documents in their assignment
 * order and links to each.
 */

import { AlignApi } from "./api.js";
import { AnnotatorApp } from "./app.js";

function params(): URLSearchParams {
  return new URLSearchParams(window.location.search);
}

async function showDocumentList(api: AlignApi, annotator: string, root: HTMLElement): Promise<void> {
  const docs = await api.listDocuments(annotator);
  const list = document.createElement("ul");
  list.className = "doc-list";
  for (const doc of docs) {
    const item = document.createElement("li");
    const link = document.createElement("a");
    const search = new URLSearchParams({ doc: doc.doc_id, annotator });
    if (params().get("api")) search.set("api", params().get("api")!);
    link.href = `?${search}`;
    const done = doc.completion[annotator] ?? 0;
    link.textContent = `${doc.doc_id} (${doc.n_markers} silences, ${Math.round(done * 100)}% done)`;
    item.appendChild(link);
    list.appendChild(item);
  }
  root.textContent = "";
  root.appendChild(list);
}

async function boot(): Promise<void> {
  const root = document.getElementById("app")!;
  const query = params();
  const annotator = query.get("annotator") ?? "anonymous";
  const api = new AlignApi(query.get("api") ?? "");

  const docId = query.get("doc");
  if (!docId) {
    await showDocumentList(api, annotator, root);
    return;
  }

  const media = document.createElement("audio");
  media.src = api.audioUrl(docId);
  media.preload = "auto";
  document.body.appendChild(media);

  const app = new AnnotatorApp({ api, media, root, docId, annotatorId: annotator });
  try {
    await app.load();
  } catch (err) {
    root.textContent = `Could not load document ${docId}: ${String(err)}`;
  }
}

void boot();
