/** Response shapes of the esglens HTTP API, as consumed by the client. */
export {};
