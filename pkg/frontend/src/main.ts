/** Browser entry point: wires the flow to the real DOM.
 *
 * The participant token comes from the ?token= query parameter handed
 * out alongside the study invitation.
 */

import { StudyApiClient } from "./api.js";
import { StudyFlow } from "./flow.js";
import { renderFlow } from "./render.js";
import { Metric } from "./types.js";

function mount(root: HTMLElement, flow: StudyFlow): void {
  const rerender = () => {
    root.innerHTML = renderFlow(flow);
  };

  root.addEventListener("change", (event) => {
    const target = event.target as HTMLSelectElement;
    if (target.tagName !== "SELECT" || target.value === "") {
      return;
    }
    const key = target.dataset.key;
    const metric = target.dataset.metric as Metric | undefined;
    if (key === undefined || metric === undefined) {
      return;
    }
    flow.setScore(key, metric, Number(target.value));
    rerender();
  });

  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.id === "ack") {
      void flow.acknowledge().then(rerender);
    } else if (target.id === "submit") {
      void flow.submit().then(rerender);
    } else if (target.id === "retry") {
      void flow.retry().then(rerender);
    }
  });

  rerender();
  void flow.start().then(rerender);
}

const root = document.getElementById("app");
const token = new URLSearchParams(window.location.search).get("token");
if (root === null) {
  throw new Error("missing #app mount point");
}
if (token === null || token === "") {
  root.innerHTML =
    "<p class=\"error\">Missing participant token: open the link from your invitation.</p>";
} else {
  const api = new StudyApiClient("", (url, init) => fetch(url, init));
  mount(root, new StudyFlow(api, token, window.localStorage));
}
