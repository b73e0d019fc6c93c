/* tslint:disable */
/* eslint-disable */

/**
 * CDFs of the p-value and the posterior probability of non-equivalence at the
 * lower margin, for levels `t` on an even grid over [0, 1].
 */
export function conservativity_curve(n: number, theta1: number, theta2: number, prior_p: number, prior_q: number, points: number): Float64Array;

/**
 * Rejection probability of both procedures over theta in (0, 1).
 */
export function power_curve(n: number, theta1: number, theta2: number, prior_p: number, prior_q: number, alpha: number, points: number): Float64Array;

/**
 * Correlation of the two-sided posterior probability and p-value as a function
 * of the data weight `w`, as `[w, rho]` pairs on (0, 1].
 */
export function two_sided_correlation(points: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly conservativity_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly power_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly two_sided_correlation: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
