/** Frozen CSV column contracts shared with the simulation CLI. */

export const TRAJECTORY_HEADER = [
  "gamma_t",
  "jz_mean",
  "jz2_mean",
  "p_total",
  "p_ind",
  "p_corr",
  "wysi_sigma_z",
  "wysi_jx",
  "w_xx",
  "w_zz",
  "lqu",
  "lqu_minimizer",
] as const;

export const POPULATIONS_HEADER = ["gamma_t", "m", "p"] as const;

export const SCALING_HEADER = [
  "n",
  "t_max",
  "t_min",
  "gap",
  "t_i",
  "t_f",
  "width_dsc",
  "p_max_over_n2",
] as const;

export const FIG2_HEADER = ["gamma_t", "p_total", "wysi_jx"] as const;

export const FIG2_NORM_HEADER = [
  ...FIG2_HEADER,
  "p_total_norm",
  "wysi_jx_norm",
] as const;
