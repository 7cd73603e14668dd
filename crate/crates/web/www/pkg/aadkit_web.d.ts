/* tslint:disable */
/* eslint-disable */

/**
 * Synthetic experiment knobs exposed to the page.
 */
export class DemoConfig {
    free(): void;
    [Symbol.dispose](): void;
    constructor(seed: bigint, n_trials: number, trial_s: number, n_electrodes: number, noise_std: number, unattended_gain: number);
    n_electrodes: number;
    n_trials: number;
    noise_std: number;
    seed: bigint;
    trial_s: number;
    unattended_gain: number;
}

export class Image {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    cols: number;
    rows: number;
    readonly data: Float64Array;
}

export class Trace {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly centers_s: Float64Array;
    readonly transition_s: number | undefined;
    readonly values: Float64Array;
}

export function accuracyCurve(cfg: DemoConfig, durations: Float64Array): Float64Array;

export function switchTrace(cfg: DemoConfig, duration_s: number, segment_s: number): Trace;

export function toneMel(freq_hz: number, seconds: number, n_bands: number): Image;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_democonfig_free: (a: number, b: number) => void;
    readonly __wbg_get_democonfig_n_electrodes: (a: number) => number;
    readonly __wbg_get_democonfig_n_trials: (a: number) => number;
    readonly __wbg_get_democonfig_noise_std: (a: number) => number;
    readonly __wbg_get_democonfig_seed: (a: number) => bigint;
    readonly __wbg_get_democonfig_trial_s: (a: number) => number;
    readonly __wbg_get_democonfig_unattended_gain: (a: number) => number;
    readonly __wbg_get_image_cols: (a: number) => number;
    readonly __wbg_get_image_rows: (a: number) => number;
    readonly __wbg_image_free: (a: number, b: number) => void;
    readonly __wbg_set_democonfig_n_electrodes: (a: number, b: number) => void;
    readonly __wbg_set_democonfig_n_trials: (a: number, b: number) => void;
    readonly __wbg_set_democonfig_noise_std: (a: number, b: number) => void;
    readonly __wbg_set_democonfig_seed: (a: number, b: bigint) => void;
    readonly __wbg_set_democonfig_trial_s: (a: number, b: number) => void;
    readonly __wbg_set_democonfig_unattended_gain: (a: number, b: number) => void;
    readonly __wbg_set_image_cols: (a: number, b: number) => void;
    readonly __wbg_set_image_rows: (a: number, b: number) => void;
    readonly __wbg_trace_free: (a: number, b: number) => void;
    readonly accuracyCurve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly democonfig_new: (a: bigint, b: number, c: number, d: number, e: number, f: number) => number;
    readonly image_data: (a: number) => [number, number];
    readonly switchTrace: (a: number, b: number, c: number) => [number, number, number];
    readonly toneMel: (a: number, b: number, c: number) => [number, number, number];
    readonly trace_centers_s: (a: number) => [number, number];
    readonly trace_transition_s: (a: number) => [number, number];
    readonly trace_values: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
