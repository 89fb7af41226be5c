//! Physical and controller parameters of the MTDC-linked system.
//!
//! Defaults reproduce the published test bed. Quantities without a
//! published value carry typical textbook figures and are marked as such.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-unit bases shared by every component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemBase {
    pub f_hz: f64,
    pub s_mva: f64,
    pub v_ac_kv: f64,
    /// Pole-to-pole DC voltage.
    pub v_dc_kv: f64,
}

impl Default for SystemBase {
    fn default() -> Self {
        Self { f_hz: 60.0, s_mva: 1000.0, v_ac_kv: 380.0, v_dc_kv: 640.0 }
    }
}

impl SystemBase {
    pub fn omega_b(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.f_hz
    }

    /// DC base impedance in ohms.
    pub fn z_dc(&self) -> f64 {
        self.v_dc_kv * self.v_dc_kv / self.s_mva
    }

    /// AC base impedance in ohms.
    pub fn z_ac(&self) -> f64 {
        self.v_ac_kv * self.v_ac_kv / self.s_mva
    }

    /// Capacitance in µF to a DC-side time constant in seconds.
    pub fn dc_cap_seconds(&self, c_uf: f64) -> f64 {
        c_uf * 1e-6 * self.z_dc()
    }

    /// AC inductance in mH to per unit.
    pub fn ac_inductance_pu(&self, l_mh: f64) -> f64 {
        l_mh * 1e-3 * self.omega_b() / self.z_ac()
    }
}

/// Aggregate synchronous generator with governor, reheat turbine and exciter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SgParams {
    pub v_rate_kv: f64,
    pub h: f64,
    pub rs: f64,
    /// Stator leakage reactance.
    pub ls: f64,
    pub xd: f64,
    pub xd_t: f64,
    pub xd_st: f64,
    pub xq: f64,
    pub xq_t: f64,
    pub xq_st: f64,
    pub td0_t: f64,
    pub tq0_t: f64,
    pub td0_st: f64,
    pub tq0_st: f64,
    pub damping: f64,
    pub droop_r: f64,
    pub tg: f64,
    pub tsm: f64,
    pub tch: f64,
    pub trh: f64,
    pub fhp: f64,
    pub kc: f64,
    pub te: f64,
    /// Operating-point active and reactive output.
    pub p0: f64,
    pub q0: f64,
}

impl Default for SgParams {
    fn default() -> Self {
        Self {
            v_rate_kv: 26.3,
            h: 3.5,
            rs: 0.0015,
            ls: 0.15,
            xd: 1.8,
            xd_t: 0.3,
            xd_st: 0.25,
            xq: 1.7,
            xq_t: 0.55,
            xq_st: 0.25,
            td0_t: 2.0,
            tq0_t: 0.75,
            td0_st: 0.30,
            tq0_st: 0.055,
            damping: 0.0,
            droop_r: 0.05,
            tg: 0.01,
            tsm: 0.05,
            tch: 0.1,
            trh: 7.0,
            fhp: 0.3,
            kc: 200.0,
            te: 0.02,
            p0: 0.8,
            q0: 0.2,
        }
    }
}

/// Regional AC network: coupling transformer, aggregate load and PLL.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcParams {
    /// Transformer reactance between generator terminal and PCC.
    pub xg: f64,
    pub tau_load: f64,
    /// Load active-current sensitivity to PCC voltage.
    pub k_pv: f64,
    /// Load reactive-current sensitivity to PCC voltage.
    pub k_qv: f64,
    /// Load frequency sensitivity (pu power per pu frequency).
    pub load_damping: f64,
    pub pll_kp: f64,
    pub pll_ki: f64,
}

impl Default for AcParams {
    fn default() -> Self {
        Self {
            xg: 0.01,
            tau_load: 0.05,
            k_pv: 0.8,
            k_qv: 0.3,
            load_damping: 1.0,
            pll_kp: 1.06,
            pll_ki: 212.0,
        }
    }
}

/// Grid-side voltage-source converter with P–Vdc droop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VscParams {
    pub rf: f64,
    pub lf: f64,
    pub c_uf: f64,
    pub outer_kp: f64,
    pub outer_ki: f64,
    pub r_droop: f64,
    /// Bandwidth of the inner current loop (rad/s).
    pub inner_alpha: f64,
    /// Inductance the inner loop was tuned for; `None` tracks `lf`.
    pub inner_design_lf: Option<f64>,
    /// Operating-point power injected into the AC grid.
    pub p0: f64,
}

impl Default for VscParams {
    fn default() -> Self {
        Self {
            rf: 0.003,
            lf: 0.05,
            c_uf: 200.0,
            outer_kp: 0.5,
            outer_ki: 2.0,
            r_droop: 2.0,
            inner_alpha: 300.0,
            inner_design_lf: None,
            p0: 0.5,
        }
    }
}

/// Line-commutated converter under power control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LccParams {
    pub l_sm: f64,
    pub c_f: f64,
    /// DC-side terminal capacitance (µF).
    pub c_uf: f64,
    pub power_kp: f64,
    pub power_ki: f64,
    pub current_kp: f64,
    pub current_ki: f64,
    /// Sensitivity of DC voltage to firing angle.
    pub k_alpha: f64,
    /// Sensitivity of DC voltage to AC voltage.
    pub k_v: f64,
    /// Equivalent commutation resistance.
    pub r_c: f64,
    /// Reactive current drawn per unit DC current.
    pub k_q: f64,
    pub tau_alpha: f64,
    pub tau_ac: f64,
    pub tau_f: f64,
    /// Operating-point power injected into the AC grid (negative: rectifier).
    pub p0: f64,
}

impl Default for LccParams {
    fn default() -> Self {
        Self {
            l_sm: 0.02,
            c_f: 0.1,
            c_uf: 50.0,
            power_kp: 0.7,
            power_ki: 5.0,
            current_kp: 0.2,
            current_ki: 20.0,
            k_alpha: 0.27,
            k_v: 1.0,
            r_c: 0.05,
            k_q: 0.5,
            tau_alpha: 0.005,
            tau_ac: 0.005,
            tau_f: 0.005,
            p0: -0.2,
        }
    }
}

/// Converter interfacing an AC grid with the DC network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConverterParams {
    Gsvsc(VscParams),
    Lcc(LccParams),
}

impl ConverterParams {
    pub fn kind(&self) -> &'static str {
        match self {
            ConverterParams::Gsvsc(_) => "gsvsc",
            ConverterParams::Lcc(_) => "lcc",
        }
    }
}

/// PMSG offshore wind farm behind its wind-farm VSC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OwfParams {
    pub pole_pairs: u32,
    pub rs: f64,
    pub ls: f64,
    pub phi_f: f64,
    pub h: f64,
    pub speed_kp: f64,
    pub speed_ki: f64,
    pub current_alpha: f64,
    /// Lag of the power transfer through the wind-farm VSC.
    pub tau_w: f64,
    /// DC terminal capacitance of the wind-farm VSC (µF).
    pub c_uf: f64,
    /// Operating-point power and wind speed (m/s).
    pub p_w0: f64,
    pub v_w0: f64,
}

impl Default for OwfParams {
    fn default() -> Self {
        Self {
            pole_pairs: 48,
            rs: 0.027,
            ls: 0.5131,
            phi_f: 1.1884,
            h: 0.685,
            speed_kp: 0.5,
            speed_ki: 3.0,
            current_alpha: 200.0,
            tau_w: 0.02,
            c_uf: 200.0,
            p_w0: 0.8,
            v_w0: 12.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DcLine {
    pub from: usize,
    pub to: usize,
    pub length_km: f64,
}

/// Π-section DC cable network. Buses are numbered from 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DcNetworkParams {
    pub r_ohm_km: f64,
    pub l_mh_km: f64,
    pub c_uf_km: f64,
    pub n_buses: usize,
    pub lines: Vec<DcLine>,
}

impl Default for DcNetworkParams {
    fn default() -> Self {
        let line = |from, to, length_km| DcLine { from, to, length_km };
        Self {
            r_ohm_km: 0.0139,
            l_mh_km: 0.159,
            c_uf_km: 0.231,
            n_buses: 4,
            lines: vec![line(1, 2, 200.0), line(1, 3, 150.0), line(2, 3, 150.0), line(3, 4, 100.0)],
        }
    }
}

/// One regional AC grid: generator, network and its MTDC converter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    #[serde(default)]
    pub sg: SgParams,
    #[serde(default)]
    pub ac: AcParams,
    pub converter: ConverterParams,
}

/// Full parameter set. Grid `k` (1-based) connects to DC bus `k`; the
/// wind farm connects to the last DC bus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemParams {
    pub base: SystemBase,
    pub grids: Vec<GridParams>,
    pub owf: OwfParams,
    pub dc: DcNetworkParams,
}

impl Default for SystemParams {
    fn default() -> Self {
        let vsc = || GridParams {
            sg: SgParams::default(),
            ac: AcParams::default(),
            converter: ConverterParams::Gsvsc(VscParams::default()),
        };
        Self {
            base: SystemBase::default(),
            grids: vec![
                vsc(),
                vsc(),
                GridParams {
                    sg: SgParams::default(),
                    ac: AcParams::default(),
                    converter: ConverterParams::Lcc(LccParams::default()),
                },
            ],
            owf: OwfParams::default(),
            dc: DcNetworkParams::default(),
        }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(field, format!("must be positive, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::validation(field, format!("must be non-negative, got {v}")))
    }
}

fn finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(field, format!("must be finite, got {v}")))
    }
}

impl SgParams {
    pub fn validate(&self) -> Result<()> {
        for (f, v) in [
            ("sg.v_rate_kv", self.v_rate_kv),
            ("sg.h", self.h),
            ("sg.ls", self.ls),
            ("sg.td0_t", self.td0_t),
            ("sg.tq0_t", self.tq0_t),
            ("sg.td0_st", self.td0_st),
            ("sg.tq0_st", self.tq0_st),
            ("sg.droop_r", self.droop_r),
            ("sg.tg", self.tg),
            ("sg.tsm", self.tsm),
            ("sg.tch", self.tch),
            ("sg.trh", self.trh),
            ("sg.te", self.te),
        ] {
            positive(f, v)?;
        }
        for (f, v) in [("sg.rs", self.rs), ("sg.damping", self.damping), ("sg.kc", self.kc)] {
            non_negative(f, v)?;
        }
        finite("sg.p0", self.p0)?;
        finite("sg.q0", self.q0)?;
        if !(self.fhp > 0.0 && self.fhp < 1.0) {
            return Err(Error::validation("sg.fhp", format!("must lie in (0, 1), got {}", self.fhp)));
        }
        if !(self.xd > self.xd_t && self.xd_t > self.xd_st && self.xd_st > self.ls) {
            return Err(Error::validation("sg.xd", "need xd > xd_t > xd_st > ls"));
        }
        if !(self.xq > self.xq_t && self.xq_t > self.xq_st && self.xq_st > self.ls) {
            return Err(Error::validation("sg.xq", "need xq > xq_t > xq_st > ls"));
        }
        if (self.xd_st - self.xq_st).abs() > 1e-12 {
            return Err(Error::validation("sg.xq_st", "sub-transient saliency is not modelled; set xq_st = xd_st"));
        }
        Ok(())
    }
}

impl AcParams {
    pub fn validate(&self) -> Result<()> {
        for (f, v) in [
            ("ac.xg", self.xg),
            ("ac.tau_load", self.tau_load),
            ("ac.pll_kp", self.pll_kp),
            ("ac.pll_ki", self.pll_ki),
        ] {
            positive(f, v)?;
        }
        for (f, v) in [("ac.k_pv", self.k_pv), ("ac.k_qv", self.k_qv), ("ac.load_damping", self.load_damping)] {
            non_negative(f, v)?;
        }
        Ok(())
    }
}

impl VscParams {
    pub fn validate(&self) -> Result<()> {
        for (f, v) in [
            ("converter.rf", self.rf),
            ("converter.lf", self.lf),
            ("converter.c_uf", self.c_uf),
            ("converter.inner_alpha", self.inner_alpha),
        ] {
            positive(f, v)?;
        }
        if let Some(l) = self.inner_design_lf {
            positive("converter.inner_design_lf", l)?;
        }
        for (f, v) in [
            ("converter.outer_kp", self.outer_kp),
            ("converter.outer_ki", self.outer_ki),
            ("converter.r_droop", self.r_droop),
        ] {
            non_negative(f, v)?;
        }
        finite("converter.p0", self.p0)
    }
}

impl LccParams {
    pub fn validate(&self) -> Result<()> {
        for (f, v) in [
            ("converter.l_sm", self.l_sm),
            ("converter.c_uf", self.c_uf),
            ("converter.tau_alpha", self.tau_alpha),
            ("converter.tau_ac", self.tau_ac),
            ("converter.tau_f", self.tau_f),
            ("converter.k_v", self.k_v),
        ] {
            positive(f, v)?;
        }
        for (f, v) in [
            ("converter.c_f", self.c_f),
            ("converter.power_kp", self.power_kp),
            ("converter.power_ki", self.power_ki),
            ("converter.current_kp", self.current_kp),
            ("converter.current_ki", self.current_ki),
            ("converter.k_alpha", self.k_alpha),
            ("converter.r_c", self.r_c),
            ("converter.k_q", self.k_q),
        ] {
            non_negative(f, v)?;
        }
        finite("converter.p0", self.p0)
    }
}

impl ConverterParams {
    pub fn validate(&self) -> Result<()> {
        match self {
            ConverterParams::Gsvsc(p) => p.validate(),
            ConverterParams::Lcc(p) => p.validate(),
        }
    }
}

impl OwfParams {
    pub fn validate(&self) -> Result<()> {
        if self.pole_pairs == 0 {
            return Err(Error::validation("owf.pole_pairs", "must be a positive integer"));
        }
        for (f, v) in [
            ("owf.rs", self.rs),
            ("owf.ls", self.ls),
            ("owf.phi_f", self.phi_f),
            ("owf.h", self.h),
            ("owf.current_alpha", self.current_alpha),
            ("owf.tau_w", self.tau_w),
            ("owf.c_uf", self.c_uf),
            ("owf.v_w0", self.v_w0),
        ] {
            positive(f, v)?;
        }
        for (f, v) in [("owf.speed_kp", self.speed_kp), ("owf.speed_ki", self.speed_ki), ("owf.p_w0", self.p_w0)] {
            non_negative(f, v)?;
        }
        Ok(())
    }
}

impl DcNetworkParams {
    pub fn validate(&self) -> Result<()> {
        positive("dc.r_ohm_km", self.r_ohm_km)?;
        positive("dc.l_mh_km", self.l_mh_km)?;
        positive("dc.c_uf_km", self.c_uf_km)?;
        if self.n_buses < 2 {
            return Err(Error::Topology(format!("need at least 2 DC buses, got {}", self.n_buses)));
        }
        for (i, l) in self.lines.iter().enumerate() {
            positive(&format!("dc.lines[{i}].length_km"), l.length_km)?;
            if l.from == l.to || l.from == 0 || l.to == 0 || l.from > self.n_buses || l.to > self.n_buses {
                return Err(Error::Topology(format!("line {i} joins invalid buses {}-{}", l.from, l.to)));
            }
        }
        // connectivity by union-find
        let mut parent: Vec<usize> = (0..self.n_buses).collect();
        fn root(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for l in &self.lines {
            let (a, b) = (root(&mut parent, l.from - 1), root(&mut parent, l.to - 1));
            parent[a] = b;
        }
        let r0 = root(&mut parent, 0);
        if let Some(bus) = (1..self.n_buses).find(|&b| root(&mut parent, b) != r0) {
            return Err(Error::Topology(format!("DC bus {} is not connected to bus 1", bus + 1)));
        }
        Ok(())
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        positive("base.f_hz", self.base.f_hz)?;
        positive("base.s_mva", self.base.s_mva)?;
        positive("base.v_ac_kv", self.base.v_ac_kv)?;
        positive("base.v_dc_kv", self.base.v_dc_kv)?;
        if self.grids.is_empty() {
            return Err(Error::validation("grids", "at least one AC grid is required"));
        }
        for g in &self.grids {
            g.sg.validate()?;
            g.ac.validate()?;
            g.converter.validate()?;
        }
        self.owf.validate()?;
        self.dc.validate()?;
        if self.dc.n_buses != self.grids.len() + 1 {
            return Err(Error::Topology(format!(
                "{} grids plus the wind farm need {} DC buses, network has {}",
                self.grids.len(),
                self.grids.len() + 1,
                self.dc.n_buses
            )));
        }
        Ok(())
    }

    /// Visits every physical model parameter in a fixed order. Operating
    /// points, bases, integer quantities and the transient/sub-transient
    /// reactance chain (whose ordering must be preserved) are not visited.
    pub fn visit_physical(&mut self, f: &mut dyn FnMut(&str, &mut f64)) {
        for (k, g) in self.grids.iter_mut().enumerate() {
            let s = &mut g.sg;
            for (name, v) in [
                ("h", &mut s.h),
                ("rs", &mut s.rs),
                ("xd", &mut s.xd),
                ("xq", &mut s.xq),
                ("td0_t", &mut s.td0_t),
                ("tq0_t", &mut s.tq0_t),
                ("td0_st", &mut s.td0_st),
                ("tq0_st", &mut s.tq0_st),
                ("tg", &mut s.tg),
                ("tsm", &mut s.tsm),
                ("tch", &mut s.tch),
                ("trh", &mut s.trh),
                ("fhp", &mut s.fhp),
                ("te", &mut s.te),
            ] {
                f(&format!("grids[{k}].sg.{name}"), v);
            }
            let a = &mut g.ac;
            for (name, v) in [
                ("xg", &mut a.xg),
                ("tau_load", &mut a.tau_load),
                ("k_pv", &mut a.k_pv),
                ("k_qv", &mut a.k_qv),
                ("load_damping", &mut a.load_damping),
            ] {
                f(&format!("grids[{k}].ac.{name}"), v);
            }
            match &mut g.converter {
                ConverterParams::Gsvsc(c) => {
                    for (name, v) in [("rf", &mut c.rf), ("lf", &mut c.lf), ("c_uf", &mut c.c_uf)] {
                        f(&format!("grids[{k}].converter.{name}"), v);
                    }
                }
                ConverterParams::Lcc(c) => {
                    for (name, v) in [
                        ("l_sm", &mut c.l_sm),
                        ("c_f", &mut c.c_f),
                        ("c_uf", &mut c.c_uf),
                        ("k_alpha", &mut c.k_alpha),
                        ("r_c", &mut c.r_c),
                        ("tau_alpha", &mut c.tau_alpha),
                        ("tau_ac", &mut c.tau_ac),
                        ("tau_f", &mut c.tau_f),
                    ] {
                        f(&format!("grids[{k}].converter.{name}"), v);
                    }
                }
            }
        }
        let o = &mut self.owf;
        for (name, v) in [
            ("rs", &mut o.rs),
            ("ls", &mut o.ls),
            ("phi_f", &mut o.phi_f),
            ("h", &mut o.h),
            ("tau_w", &mut o.tau_w),
            ("c_uf", &mut o.c_uf),
        ] {
            f(&format!("owf.{name}"), v);
        }
        let d = &mut self.dc;
        for (name, v) in [("r_ohm_km", &mut d.r_ohm_km), ("l_mh_km", &mut d.l_mh_km), ("c_uf_km", &mut d.c_uf_km)] {
            f(&format!("dc.{name}"), v);
        }
        for (i, l) in d.lines.iter_mut().enumerate() {
            f(&format!("dc.lines[{i}].length_km"), &mut l.length_km);
        }
    }
}
