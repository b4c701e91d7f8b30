//! Published condition sets, transcribed verbatim for the audit.
//!
//! Notation: `fr`, `fi` are the real and imaginary parts of a single split;
//! `g, h, k, l` the four parts of a double split; `f_v` is the partial of
//! `f` in `v`; greek names are spelled out.

use crate::cr::{Arg, Form};
use crate::system::SplitVariant;

/// What a printed group is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// Condition rows of the listed families.
    Rows(&'static [(Arg, Form)]),
    /// Definitions of the derivative combinations.
    Combinations,
}

#[derive(Clone, Copy, Debug)]
pub struct PrintedGroup {
    pub id: &'static str,
    pub variant: SplitVariant,
    pub target: Target,
    pub rows: &'static [&'static str],
}

use Arg::*;
use Form::*;

pub const GROUPS: &[PrintedGroup] = &[
    PrintedGroup {
        id: "ode2",
        variant: SplitVariant::Ode2,
        target: Target::Rows(&[(U, Outer), (Du, Outer)]),
        rows: &["fr_p = fi_q", "fr_q = -fi_p", "fr_p' = fi_q'", "fr_q' = -fi_p'"],
    },
    PrintedGroup {
        id: "pde2-point",
        variant: SplitVariant::Pde2,
        target: Target::Rows(&[(Jets, Outer), (R, Outer), (U, Outer)]),
        rows: &[
            "p_s = q_t",
            "p_t = -q_s",
            "fr_s = fi_t",
            "fr_t = -fi_s",
            "fr_p = fi_q",
            "fr_q = -fi_p",
        ],
    },
    PrintedGroup {
        id: "pde2-combinations",
        variant: SplitVariant::Pde2,
        target: Target::Combinations,
        rows: &["phi = p_s + q_t", "psi = p_t - q_s"],
    },
    PrintedGroup {
        id: "pde2-derivative",
        variant: SplitVariant::Pde2,
        target: Target::Rows(&[(Du, Outer)]),
        rows: &["fr_phi = fi_psi", "fr_psi = -fi_phi"],
    },
    PrintedGroup {
        id: "ode3",
        variant: SplitVariant::Ode3,
        target: Target::Rows(&[(U, Inner), (Du, Inner)]),
        rows: &["k_y = l_z", "k_z = -l_y", "k_y' = l_z'", "k_z' = -l_y'"],
    },
    PrintedGroup {
        id: "ode3-dual",
        variant: SplitVariant::Ode3Dual,
        target: Target::Rows(&[(U, Inner), (Du, Inner)]),
        rows: &["g_y = h_z", "g_z = -h_y", "g_y' = h_z'", "g_z' = -h_y'"],
    },
    PrintedGroup {
        id: "ode4",
        variant: SplitVariant::Ode4,
        target: Target::Rows(&[(U, Outer), (Du, Outer)]),
        rows: &[
            "g_w + h_x = k_y + l_z",
            "g_x - h_w = k_z - l_y",
            "g_y + h_z = -k_w - l_x",
            "g_z - h_y = -k_x + l_w",
            "g_w' + h_x' = k_y' + l_z'",
            "g_x' - h_w' = k_z' - l_y'",
            "g_y' + h_z' = -k_w' - l_x'",
            "g_z' - h_y' = -k_x' + l_w'",
        ],
    },
    PrintedGroup {
        id: "pde4x2-point",
        variant: SplitVariant::Pde4x2,
        target: Target::Rows(&[(Jets, Inner), (U, Inner)]),
        rows: &[
            "w_s = x_t",
            "w_t = -x_s",
            "y_s = z_t",
            "y_t = -z_s",
            "g_w = h_x",
            "g_x = -h_w",
            "g_y = h_z",
            "g_z = -h_y",
            "k_w = l_x",
            "k_x = -l_w",
            "k_y = l_z",
            "k_z = -l_w",
        ],
    },
    PrintedGroup {
        id: "pde4x2-combinations",
        variant: SplitVariant::Pde4x2,
        target: Target::Combinations,
        rows: &[
            "phi = w_s + x_t",
            "psi = w_t - s_x",
            "kappa = y_s + z_t",
            "lambda = y_t - z_s",
        ],
    },
    PrintedGroup {
        id: "pde4x2-derivative",
        variant: SplitVariant::Pde4x2,
        target: Target::Rows(&[(Du, Inner)]),
        rows: &[
            "g_phi = h_psi",
            "g_psi = -h_phi",
            "k_kappa = l_lambda",
            "k_lambda = -l_kappa",
        ],
    },
    PrintedGroup {
        id: "pde4x2-dual-point",
        variant: SplitVariant::Pde4x2Dual,
        target: Target::Rows(&[(Jets, Outer), (U, Outer)]),
        rows: &[
            "w_s = y_t",
            "w_t = -y_s",
            "x_s = z_t",
            "x_t = -z_s",
            "g_w + h_x = k_y + l_z",
            "g_x - h_w = k_z - l_y",
            "g_y + h_z = -k_w - l_x",
            "g_z - h_y = -k_x + l_w",
        ],
    },
    PrintedGroup {
        id: "pde4x2-dual-combinations",
        variant: SplitVariant::Pde4x2Dual,
        target: Target::Combinations,
        rows: &[
            "alpha = w_s + y_t",
            "beta = x_s + z_t",
            "gamma = w_t - y_s",
            "delta = x_t - z_s",
        ],
    },
    PrintedGroup {
        id: "pde4x2-dual-derivative",
        variant: SplitVariant::Pde4x2Dual,
        target: Target::Rows(&[(Du, Outer)]),
        rows: &[
            "g_alpha + h_beta = k_gamma + l_delta",
            "g_beta - h_alpha = k_delta - l_gamma",
            "g_gamma + h_delta = -k_alpha - l_beta",
            "g_delta - h_gamma = -k_beta + l_alpha",
        ],
    },
    PrintedGroup {
        id: "pde4x4-point",
        variant: SplitVariant::Pde4x4,
        target: Target::Rows(&[(Jets, Outer), (R, Outer), (U, Outer)]),
        rows: &[
            "w_s + x_t = y_u + z_v",
            "w_t - x_s = y_v - z_u",
            "w_u + x_v = -y_s - z_t",
            "w_v - x_u = -y_v + z_u",
            "g_s + h_t = k_u + l_v",
            "g_t - h_s = k_v - l_u",
            "g_u + h_v = -k_s - l_t",
            "g_v - h_u = -k_t + l_s",
            "g_w + h_x = k_y + l_z",
            "g_x - h_w = k_z - l_y",
            "g_y + h_z = -k_w - l_x",
            "g_z - h_y = -k_x + l_w",
        ],
    },
    PrintedGroup {
        id: "pde4x4-combinations",
        variant: SplitVariant::Pde4x4,
        target: Target::Combinations,
        rows: &[
            "alpha = w_s + x_t + y_u + z_v",
            "beta = w_t - x_s + y_v - z_u",
            "gamma = w_u + x_v - y_s - z_t",
            "delta = w_v - x_u - y_t + z_s",
        ],
    },
    PrintedGroup {
        id: "pde4x4-derivative",
        variant: SplitVariant::Pde4x4,
        target: Target::Rows(&[(Du, Outer)]),
        rows: &[
            "g_alpha - h_beta = k_gamma - l_delta",
            "g_beta + h_alpha = k_delta + l_gamma",
            "g_gamma - h_delta = -k_alpha + l_beta",
            "g_delta + h_gamma = -k_beta - l_alpha",
        ],
    },
];

pub fn group(id: &str) -> Option<&'static PrintedGroup> {
    GROUPS.iter().find(|g| g.id == id)
}
