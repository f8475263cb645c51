/* tslint:disable */
/* eslint-disable */

/**
 * Summary and DDT of an S-box given in the `sbox s=.. t=..` file format.
 */
export function analyze_sbox(text: string): string;

/**
 * Round-by-round encryption of one block under the reference instance,
 * with TEST-ONLY round keys derived from `master`.
 */
export function encrypt_trace(master: string, plaintext: string, rounds: number): string;

/**
 * Minimum active S-boxes and the differential trail bound for 1..=`max_rounds`.
 */
export function trail_curve(max_rounds: number, refined: boolean): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly analyze_sbox: (a: number, b: number) => [number, number];
    readonly encrypt_trace: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly trail_curve: (a: number, b: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
