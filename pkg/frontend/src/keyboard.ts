export type KeyBindings = Record<string, (event: KeyboardEvent) => void>;

function keyId(event: KeyboardEvent): string {
  const parts = [];
  if (event.ctrlKey || event.metaKey) parts.push("ctrl");
  parts.push(event.key.toLowerCase());
  return parts.join("+");
}

/**
 * Attach keyboard shortcuts; returns the unbind function.
 * Plain-key bindings are suppressed while typing in an input or textarea,
 * ctrl-combinations stay live everywhere.
 */
export function bindShortcuts(target: Window | HTMLElement, bindings: KeyBindings): () => void {
  const handler = (event: Event) => {
    const keyboardEvent = event as KeyboardEvent;
    const id = keyId(keyboardEvent);
    const action = bindings[id];
    if (!action) return;
    const element = keyboardEvent.target as HTMLElement | null;
    const typing = element && (element.tagName === "INPUT" || element.tagName === "TEXTAREA");
    if (typing && !id.startsWith("ctrl+")) return;
    keyboardEvent.preventDefault();
    action(keyboardEvent);
  };
  target.addEventListener("keydown", handler);
  return () => target.removeEventListener("keydown", handler);
}
