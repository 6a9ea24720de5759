/* tslint:disable */
/* eslint-disable */

export class Lab {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Rows `[|B|, U₁₁, U₁₂, U₃₃, E₁₁, E₁₂, E₃₃]` of the maps `n·u = U∇n`,
     * `n·E = E∇n` with `B` along the third axis, background density `n`.
     */
    darcy_map(b_max: number, n: number, density: number): Float64Array;
    /**
     * Rows `[t, ‖U‖, ‖ρ_i − n̄‖, ‖u_i − ū_i‖, ‖E − Ē‖, ‖B − B̄‖]` for Gaussian
     * data, followed by one row of fitted exponents (first entry `NaN`).
     */
    decay_curves(t_min: number, t_max: number, n_t: number, nodes: number): Float64Array;
    /**
     * Rows `[k, Re λ₁, Im λ₁, …, Re λ₄, Im λ₄]` of the fluid (`em = false`)
     * or electromagnetic branches on a log grid.
     */
    dispersion(em: boolean, k_min: number, k_max: number, n: number): Float64Array;
    mu1(): number;
    mu2(): number;
    constructor(m_i: number, m_e: number, t_i: number, t_e: number, nu_i: number, nu_e: number, e: number, c: number);
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_lab_free: (a: number, b: number) => void;
    readonly lab_darcy_map: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly lab_decay_curves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly lab_dispersion: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly lab_mu1: (a: number) => number;
    readonly lab_mu2: (a: number) => number;
    readonly lab_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
