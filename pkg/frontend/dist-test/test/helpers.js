import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
const here = dirname(fileURLToPath(import.meta.url));
// compiled tests live in dist-test/test/, fixtures stay in test/fixtures/
export function loadFixture(name) {
    const candidates = [
        join(here, "fixtures", name),
        join(here, "..", "..", "test", "fixtures", name),
    ];
    for (const path of candidates) {
        try {
            return JSON.parse(readFileSync(path, "utf-8"));
        }
        catch {
            continue;
        }
    }
    throw new Error(`fixture ${name} not found`);
}
export function fakeResponse(status, body) {
    return {
        ok: status >= 200 && status < 300,
        status,
        statusText: String(status),
        json: async () => body,
    };
}
