/**
 * Cloud rendering. Tags appear in server order with the server-provided
 * font sizes, untouched: the browser's only remaining job is line
 * wrapping. GLUED neighbors are wrapped in a no-break group so they can
 * never land on different lines; unknown tokens are skipped.
 */

import type { CloudResponse, HintedElement, TagItem } from './types.js';
import { GLUED } from './types.js';

export type TagClickHandler = (tag: TagItem, modifier: 'PLAIN' | 'DICE_ADD') => void;

function isTag(element: HintedElement): element is TagItem {
  return typeof element !== 'string';
}

/** Group the hinted list into runs that must stay together. */
export function gluedRuns(elements: HintedElement[]): TagItem[][] {
  const runs: TagItem[][] = [];
  let glueNext = false;
  for (const element of elements) {
    if (!isTag(element)) {
      if (element === GLUED) glueNext = true;
      continue; // PERMUTABLE and future tokens: accepted, ignored
    }
    if (glueNext && runs.length) {
      runs[runs.length - 1].push(element);
    } else {
      runs.push([element]);
    }
    glueNext = false;
  }
  return runs;
}

function tagButton(doc: Document, tag: TagItem, onClick?: TagClickHandler): HTMLElement {
  const el = doc.createElement('button');
  el.className = 'tag';
  el.type = 'button';
  el.textContent = tag.term;
  el.style.fontSize = `${tag.display_size}px`;
  el.title = `${tag.term}: ${tag.weight}`;
  el.dataset.coords = JSON.stringify(tag.coords);
  el.dataset.weight = String(tag.weight);
  if (onClick) {
    el.addEventListener('click', (ev) =>
      onClick(tag, ev.ctrlKey || ev.metaKey ? 'DICE_ADD' : 'PLAIN'),
    );
  }
  return el;
}

export function renderCloud(
  container: HTMLElement,
  response: CloudResponse,
  onClick?: TagClickHandler,
): void {
  const doc = container.ownerDocument;
  container.textContent = '';

  const hasTags = response.tags.some(isTag);
  if (!hasTags) {
    const empty = doc.createElement('p');
    empty.className = 'placeholder';
    empty.textContent = 'no data matches';
    container.appendChild(empty);
    return;
  }

  if (response.approximate) {
    const badge = doc.createElement('div');
    badge.className = 'badge approximate';
    const h = response.metrics.entropy;
    badge.textContent = h == null ? 'approximate' : `approximate · entropy ${h.toFixed(3)}`;
    container.appendChild(badge);
  }

  const cloud = doc.createElement('div');
  cloud.className = 'cloud';
  for (const run of gluedRuns(response.tags)) {
    if (run.length === 1) {
      cloud.appendChild(tagButton(doc, run[0], onClick));
      cloud.appendChild(doc.createTextNode(' '));
    } else {
      const group = doc.createElement('span');
      group.className = 'glued-group';
      // inline-block + nowrap: the group wraps as one unit, never inside
      group.style.whiteSpace = 'nowrap';
      group.style.display = 'inline-block';
      run.forEach((tag, i) => {
        if (i) group.appendChild(doc.createTextNode(' '));
        group.appendChild(tagButton(doc, tag, onClick));
      });
      cloud.appendChild(group);
      cloud.appendChild(doc.createTextNode(' '));
    }
  }
  container.appendChild(cloud);

  const metrics = doc.createElement('div');
  metrics.className = 'metrics';
  const parts = [`${response.metrics.tag_count} tags`];
  if (response.metrics.relative_entropy != null) {
    parts.push(`relative entropy ${response.metrics.relative_entropy.toFixed(3)}`);
  }
  if (response.metrics.mla_cost != null) {
    parts.push(`arrangement cost ${response.metrics.mla_cost.toFixed(2)}`);
  }
  metrics.textContent = parts.join(' · ');
  container.appendChild(metrics);
}
