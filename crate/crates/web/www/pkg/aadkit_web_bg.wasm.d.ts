/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_democonfig_free: (a: number, b: number) => void;
export const __wbg_get_democonfig_n_electrodes: (a: number) => number;
export const __wbg_get_democonfig_n_trials: (a: number) => number;
export const __wbg_get_democonfig_noise_std: (a: number) => number;
export const __wbg_get_democonfig_seed: (a: number) => bigint;
export const __wbg_get_democonfig_trial_s: (a: number) => number;
export const __wbg_get_democonfig_unattended_gain: (a: number) => number;
export const __wbg_get_image_cols: (a: number) => number;
export const __wbg_get_image_rows: (a: number) => number;
export const __wbg_image_free: (a: number, b: number) => void;
export const __wbg_set_democonfig_n_electrodes: (a: number, b: number) => void;
export const __wbg_set_democonfig_n_trials: (a: number, b: number) => void;
export const __wbg_set_democonfig_noise_std: (a: number, b: number) => void;
export const __wbg_set_democonfig_seed: (a: number, b: bigint) => void;
export const __wbg_set_democonfig_trial_s: (a: number, b: number) => void;
export const __wbg_set_democonfig_unattended_gain: (a: number, b: number) => void;
export const __wbg_set_image_cols: (a: number, b: number) => void;
export const __wbg_set_image_rows: (a: number, b: number) => void;
export const __wbg_trace_free: (a: number, b: number) => void;
export const accuracyCurve: (a: number, b: number, c: number) => [number, number, number, number];
export const democonfig_new: (a: bigint, b: number, c: number, d: number, e: number, f: number) => number;
export const image_data: (a: number) => [number, number];
export const switchTrace: (a: number, b: number, c: number) => [number, number, number];
export const toneMel: (a: number, b: number, c: number) => [number, number, number];
export const trace_centers_s: (a: number) => [number, number];
export const trace_transition_s: (a: number) => [number, number];
export const trace_values: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
