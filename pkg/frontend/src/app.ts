/** DOM wiring: binds the review session to the page.
 *
 * Keyboard shortcuts: R retain+next, D discard mode, 1-5 pick a discard
 * reason, Enter submit. The clean reference image is always visible next to
 * the live preview.
 */

import { ApiClient } from "./api.js";
import { ReviewSession, type SessionSnapshot } from "./state.js";
import { DISCARD_REASONS } from "./types.js";

const REASON_LABELS: Record<string, string> = {
  poor_baseline: "1 - Poor baseline quality",
  modality_mismatch: "2 - Modality mismatch",
  severe_over_degradation: "3 - Severe over-degradation",
  insufficient_L2: "4 - Insufficient degradation at L2",
  clinically_irrelevant: "5 - Clinically irrelevant degradation",
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function mountApp(): void {
  const params = new URLSearchParams(window.location.search);
  const annotator = params.get("annotator") ?? "anonymous";
  el<HTMLSpanElement>("annotator").textContent = annotator;

  const api = new ApiClient("");
  const previewImg = el<HTMLImageElement>("preview-image");
  const session = new ReviewSession(api, annotator, {
    onChange: render,
    onPreview: (url) => {
      // latest-wins: replacing src abandons any in-flight image load
      previewImg.src = url;
    },
  });

  const reasonSelect = el<HTMLSelectElement>("reason");
  for (const reason of DISCARD_REASONS) {
    const option = document.createElement("option");
    option.value = reason;
    option.textContent = REASON_LABELS[reason];
    reasonSelect.appendChild(option);
  }

  function render(s: SessionSnapshot): void {
    el("loading").hidden = s.phase !== "loading";
    el("review").hidden = s.phase !== "reviewing";
    el("done").hidden = s.phase !== "done";
    el("error-banner").hidden = s.phase !== "error";
    if (s.phase === "error") {
      el("error-message").textContent = s.errorMessage ?? "network failure";
    }
    if (s.phase !== "reviewing" || !s.sample) return;

    el("remaining").textContent = String(s.remaining);
    el("question").textContent = s.sample.question;
    el("meta").textContent =
      `${s.sample.sample_id} | ${s.sample.modality} | ` +
      `${s.sample.type ?? "clean"} @ ${s.sample.severity}`;
    const optionsList = el<HTMLOListElement>("options");
    optionsList.innerHTML = "";
    s.sample.options.forEach((text, i) => {
      const li = document.createElement("li");
      const label = String.fromCharCode(65 + i);
      li.textContent = `${label}. ${text}` + (label === s.sample!.answer ? "  (answer)" : "");
      optionsList.appendChild(li);
    });

    if (s.cleanUrl) el<HTMLImageElement>("clean-image").src = s.cleanUrl;
    el<HTMLInputElement>("slider").value = String(s.sliderT);
    el("slider-value").textContent = s.sliderT.toFixed(2);

    const discardMode = s.draft.action === "discard";
    el<HTMLSelectElement>("reason").disabled = !discardMode;
    el<HTMLButtonElement>("discard-btn").classList.toggle("active", discardMode);
    reasonSelect.value = s.draft.reason ?? "";

    const thresholdError = session.thresholdError();
    el("threshold-error").textContent = thresholdError ?? "";
    el("threshold-state").textContent =
      `L1: ${s.thresholds.tL1?.toFixed(2) ?? "-"}  L2: ${s.thresholds.tL2?.toFixed(2) ?? "-"}`;

    el<HTMLButtonElement>("submit-btn").disabled = !session.canSubmit();
    el("inline-error").textContent = s.inlineError ?? "";
  }

  el<HTMLInputElement>("slider").addEventListener("input", (ev) => {
    session.setSlider(Number((ev.target as HTMLInputElement).value));
  });
  el<HTMLButtonElement>("retain-btn").addEventListener("click", () => {
    void session.retainAndNext();
  });
  el<HTMLButtonElement>("discard-btn").addEventListener("click", () => {
    session.setAction("discard");
  });
  reasonSelect.addEventListener("change", () => {
    const value = reasonSelect.value as (typeof DISCARD_REASONS)[number];
    session.setReason(value);
  });
  el<HTMLButtonElement>("submit-btn").addEventListener("click", () => {
    void session.submit();
  });
  el<HTMLButtonElement>("mark-l1").addEventListener("click", () => session.markThresholdL1());
  el<HTMLButtonElement>("mark-l2").addEventListener("click", () => session.markThresholdL2());
  el<HTMLButtonElement>("retry-btn").addEventListener("click", () => {
    void session.fetchNext();
  });

  window.addEventListener("keydown", (ev) => {
    if (ev.target instanceof HTMLInputElement || ev.target instanceof HTMLSelectElement) {
      if (ev.key !== "Enter") return;
    }
    if (ev.key === "r" || ev.key === "R") void session.retainAndNext();
    else if (ev.key === "d" || ev.key === "D") session.setAction("discard");
    else if (ev.key >= "1" && ev.key <= "5") session.setReasonByIndex(Number(ev.key) - 1);
    else if (ev.key === "Enter") void session.submit();
  });

  void session.start();
}

if (typeof document !== "undefined" && document.getElementById("review")) {
  mountApp();
}
