//! Domain types and geometry/writing-time semantics shared by every solver.
//!
//! All lengths are integer nanometers so overlap arithmetic and legality
//! checks are exact; reports and file formats render micrometers where
//! convenient. Two adjacent characters may overlap only within their
//! boundary blanks, and the shared amount is the smaller of the two facing
//! blanks.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Length in integer nanometers.
pub type Nm = i64;

/// Opaque candidate identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharId(pub u32);

impl std::fmt::Display for CharId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// A reusable pattern eligible for placement on the stencil.
///
/// `width`/`height` are the full footprint including the boundary blanks.
/// `vsb_shots` is the shot count when the pattern is written without the
/// stencil; writing it through the stencil costs one shot per repeat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterCandidate {
    pub id: CharId,
    pub width: Nm,
    pub height: Nm,
    pub blank_left: Nm,
    pub blank_right: Nm,
    pub blank_top: Nm,
    pub blank_bottom: Nm,
    pub vsb_shots: u64,
    /// Repeat count per wafer region, length equals the instance region count.
    pub repeats: Vec<u64>,
}

impl CharacterCandidate {
    /// Symmetrized horizontal blank `ceil((sl + sr) / 2)` used by the
    /// simplified row formulations. Ceiling keeps the value integral.
    pub fn symmetric_blank(&self) -> Nm {
        (self.blank_left + self.blank_right + 1) / 2
    }

    /// Sharable horizontal margin, `min(sl, sr)`.
    pub fn horizontal_blank(&self) -> Nm {
        self.blank_left.min(self.blank_right)
    }

    /// Sharable vertical margin, `min(st, sb)`.
    pub fn vertical_blank(&self) -> Nm {
        self.blank_top.min(self.blank_bottom)
    }

    pub fn area(&self) -> i128 {
        self.width as i128 * self.height as i128
    }

    fn validate(&self, region_count: usize) -> Result<()> {
        if self.width <= 0 || self.height <= 0 {
            return Err(Error::input(format!("{}: non-positive footprint", self.id)));
        }
        if self.blank_left < 0 || self.blank_right < 0 || self.blank_top < 0 || self.blank_bottom < 0
        {
            return Err(Error::input(format!("{}: negative blank", self.id)));
        }
        if self.blank_left + self.blank_right > self.width
            || self.blank_top + self.blank_bottom > self.height
        {
            return Err(Error::input(format!(
                "{}: blanks exceed footprint",
                self.id
            )));
        }
        if self.vsb_shots == 0 {
            return Err(Error::input(format!("{}: vsb_shots must be >= 1", self.id)));
        }
        if self.repeats.len() != region_count {
            return Err(Error::input(format!(
                "{}: repeats has length {}, expected {}",
                self.id,
                self.repeats.len(),
                region_count
            )));
        }
        Ok(())
    }
}

/// Stencil outline and row structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilMode {
    /// Fixed equal-height rows; vertical blanks do not interact.
    OneDim { rows: u32, row_height: Nm },
    /// Free placement inside the outline.
    TwoDim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StencilSpec {
    pub width: Nm,
    pub height: Nm,
    pub mode: StencilMode,
}

impl StencilSpec {
    fn validate(&self) -> Result<()> {
        if self.width <= 0 || self.height <= 0 {
            return Err(Error::input("stencil outline must be positive"));
        }
        if let StencilMode::OneDim { rows, row_height } = self.mode {
            if rows == 0 {
                return Err(Error::input("row count must be >= 1"));
            }
            if row_height <= 0 || rows as i64 * row_height > self.height {
                return Err(Error::input("rows do not fit the stencil height"));
            }
        }
        Ok(())
    }
}

/// A planning problem: candidates, outline, and wafer regions.
#[derive(Debug, Clone)]
pub struct Instance {
    pub candidates: Vec<CharacterCandidate>,
    pub stencil: StencilSpec,
    pub region_count: usize,
    /// Shots per repeat when written through the stencil. Normally 1; the
    /// hardness-reduction instances set 0 to preserve their arithmetic.
    pub cp_shots: u64,
}

impl Instance {
    pub fn new(
        candidates: Vec<CharacterCandidate>,
        stencil: StencilSpec,
        region_count: usize,
    ) -> Self {
        Instance {
            candidates,
            stencil,
            region_count,
            cp_shots: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.stencil.validate()?;
        if self.region_count == 0 {
            return Err(Error::input("region count must be >= 1"));
        }
        if self.cp_shots > 1 {
            return Err(Error::input("cp_shots must be 0 or 1"));
        }
        let mut seen = BTreeSet::new();
        for c in &self.candidates {
            c.validate(self.region_count)?;
            if !seen.insert(c.id) {
                return Err(Error::input(format!("duplicate candidate id {}", c.id)));
            }
        }
        Ok(())
    }

    pub fn candidate(&self, id: CharId) -> Result<&CharacterCandidate> {
        self.candidates
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::input(format!("unknown candidate id {id}")))
    }

    pub fn is_onedim(&self) -> bool {
        matches!(self.stencil.mode, StencilMode::OneDim { .. })
    }

    pub fn row_count(&self) -> u32 {
        match self.stencil.mode {
            StencilMode::OneDim { rows, .. } => rows,
            StencilMode::TwoDim => 0,
        }
    }

    /// Writing-time reduction of candidate `i` in region `c`:
    /// `t_ic * (n_i - cp_shots)`.
    pub fn reduction(&self, cand: &CharacterCandidate, region: usize) -> u64 {
        cand.repeats[region] * (cand.vsb_shots - self.cp_shots)
    }

    /// Per-region writing time with nothing on the stencil.
    pub fn vsb_region_times(&self) -> Vec<u64> {
        (0..self.region_count)
            .map(|c| {
                self.candidates
                    .iter()
                    .map(|ch| ch.repeats[c] * ch.vsb_shots)
                    .sum()
            })
            .collect()
    }

    /// Evaluate the system writing time for a selection. Pure function of the
    /// selected set; placement geometry is irrelevant here.
    ///
    /// `T_c = T_c^VSB - sum(R_ic)` over selected candidates, and the system
    /// time is the worst region.
    pub fn writing_time(&self, selected: &BTreeSet<CharId>) -> Result<SolutionReport> {
        let mut region_times = self.vsb_region_times();
        let mut count = 0usize;
        for &id in selected {
            let cand = self.candidate(id)?;
            count += 1;
            for (c, t) in region_times.iter_mut().enumerate() {
                *t -= self.reduction(cand, c);
            }
        }
        Ok(SolutionReport::new(region_times, count))
    }
}

/// Horizontal overlap `o_ab^h = min(sr_a, sl_b)` with `a` immediately left of
/// `b`, or the vertical analogue with `a` immediately below `b`. Asymmetric in
/// its arguments.
pub fn pairwise_overlap(a: &CharacterCandidate, b: &CharacterCandidate, axis: Axis) -> Nm {
    match axis {
        Axis::Horizontal => a.blank_right.min(b.blank_left),
        Axis::Vertical => a.blank_top.min(b.blank_bottom),
    }
}

/// Packed length of one fixed left-to-right order:
/// `sum(w_i) - sum over adjacent pairs of min(sr_i, sl_j)`.
pub fn row_length(ordered: &[&CharacterCandidate]) -> Nm {
    let mut len = 0;
    for (k, c) in ordered.iter().enumerate() {
        len += c.width;
        if k + 1 < ordered.len() {
            len -= pairwise_overlap(c, ordered[k + 1], Axis::Horizontal);
        }
    }
    len
}

/// Minimum packing length of a uniform-width set with symmetric blanks:
/// `n*M - sum(s_i) + max(s_i)`. Zero characters pack to length 0.
pub fn min_packing_length_symmetric(width: Nm, blanks: &[Nm]) -> Nm {
    if blanks.is_empty() {
        return 0;
    }
    let total: Nm = blanks.iter().sum();
    let max = *blanks.iter().max().unwrap();
    blanks.len() as Nm * width - total + max
}

/// Position of a placed character.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Row { row: u32, x: Nm },
    Free { x: Nm, y: Nm },
}

/// Selected characters with coordinates. Unselected candidates are absent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Placement {
    entries: std::collections::BTreeMap<CharId, Position>,
}

impl Placement {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: CharId, pos: Position) {
        self.entries.insert(id, pos);
    }

    pub fn get(&self, id: CharId) -> Option<Position> {
        self.entries.get(&id).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (CharId, Position)> + '_ {
        self.entries.iter().map(|(&id, &p)| (id, p))
    }

    pub fn selected(&self) -> BTreeSet<CharId> {
        self.entries.keys().copied().collect()
    }
}

impl FromIterator<(CharId, Position)> for Placement {
    fn from_iter<T: IntoIterator<Item = (CharId, Position)>>(iter: T) -> Self {
        Placement {
            entries: iter.into_iter().collect(),
        }
    }
}

/// One legality violation, identifying the offending candidate or pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    OutsideOutline { id: CharId },
    WrongPositionKind { id: CharId },
    RowOutOfRange { id: CharId, row: u32 },
    TooTallForRow { id: CharId },
    PairTooClose { a: CharId, b: CharId, axis: Axis },
}

#[derive(Debug, Clone, Default)]
pub struct LegalityReport {
    pub violations: Vec<Violation>,
}

impl LegalityReport {
    pub fn is_legal(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check outline containment and pairwise blank-sharing legality.
///
/// In 1D mode, characters on the same row are checked as consecutive pairs in
/// x-order; different rows never interact. In 2D mode every pair must be
/// separated along at least one axis by the footprint minus the allowed
/// shared blank.
pub fn check_legal(instance: &Instance, placement: &Placement) -> Result<LegalityReport> {
    let mut report = LegalityReport::default();
    let mut placed: Vec<(&CharacterCandidate, Position)> = Vec::with_capacity(placement.len());
    for (id, pos) in placement.iter() {
        placed.push((instance.candidate(id)?, pos));
    }

    match instance.stencil.mode {
        StencilMode::OneDim { rows, row_height } => {
            let mut by_row: Vec<Vec<(&CharacterCandidate, Nm)>> = vec![Vec::new(); rows as usize];
            for (cand, pos) in &placed {
                match *pos {
                    Position::Row { row, x } => {
                        if row >= rows {
                            report.violations.push(Violation::RowOutOfRange {
                                id: cand.id,
                                row,
                            });
                            continue;
                        }
                        if x < 0 || x + cand.width > instance.stencil.width {
                            report
                                .violations
                                .push(Violation::OutsideOutline { id: cand.id });
                        }
                        if cand.height > row_height {
                            report
                                .violations
                                .push(Violation::TooTallForRow { id: cand.id });
                        }
                        by_row[row as usize].push((cand, x));
                    }
                    Position::Free { .. } => {
                        report
                            .violations
                            .push(Violation::WrongPositionKind { id: cand.id });
                    }
                }
            }
            for row in &mut by_row {
                row.sort_by_key(|(c, x)| (*x, c.id));
                for pair in row.windows(2) {
                    let (a, xa) = pair[0];
                    let (b, xb) = pair[1];
                    if xb < xa + a.width - pairwise_overlap(a, b, Axis::Horizontal) {
                        report.violations.push(Violation::PairTooClose {
                            a: a.id,
                            b: b.id,
                            axis: Axis::Horizontal,
                        });
                    }
                }
            }
        }
        StencilMode::TwoDim => {
            let mut free: Vec<(&CharacterCandidate, Nm, Nm)> = Vec::with_capacity(placed.len());
            for (cand, pos) in &placed {
                match *pos {
                    Position::Free { x, y } => {
                        if x < 0
                            || y < 0
                            || x + cand.width > instance.stencil.width
                            || y + cand.height > instance.stencil.height
                        {
                            report
                                .violations
                                .push(Violation::OutsideOutline { id: cand.id });
                        }
                        free.push((cand, x, y));
                    }
                    Position::Row { .. } => {
                        report
                            .violations
                            .push(Violation::WrongPositionKind { id: cand.id });
                    }
                }
            }
            for i in 0..free.len() {
                for j in (i + 1)..free.len() {
                    let (a, xa, ya) = free[i];
                    let (b, xb, yb) = free[j];
                    let h_ok = xb >= xa + a.width - pairwise_overlap(a, b, Axis::Horizontal)
                        || xa >= xb + b.width - pairwise_overlap(b, a, Axis::Horizontal);
                    if h_ok {
                        continue;
                    }
                    let v_ok = yb >= ya + a.height - pairwise_overlap(a, b, Axis::Vertical)
                        || ya >= yb + b.height - pairwise_overlap(b, a, Axis::Vertical);
                    if !v_ok {
                        // Report the pair on the axis with the smaller shortfall.
                        report.violations.push(Violation::PairTooClose {
                            a: a.id,
                            b: b.id,
                            axis: Axis::Horizontal,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Writing-time outcome of a solve: per-region times, their maximum, the
/// selection size, and wall-clock spent producing it.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionReport {
    pub region_times: Vec<u64>,
    pub total_time: u64,
    pub selected_count: usize,
    pub seconds: f64,
    /// System writing time after each pipeline stage, in execution order.
    pub stages: Vec<(String, u64)>,
}

impl SolutionReport {
    pub fn new(region_times: Vec<u64>, selected_count: usize) -> Self {
        let total_time = region_times.iter().copied().max().unwrap_or(0);
        SolutionReport {
            region_times,
            total_time,
            selected_count,
            seconds: 0.0,
            stages: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chr(id: u32, w: Nm, sl: Nm, sr: Nm, vsb: u64, repeats: Vec<u64>) -> CharacterCandidate {
        CharacterCandidate {
            id: CharId(id),
            width: w,
            height: 1000,
            blank_left: sl,
            blank_right: sr,
            blank_top: 0,
            blank_bottom: 0,
            vsb_shots: vsb,
            repeats,
        }
    }

    fn one_row_instance(chars: Vec<CharacterCandidate>, width: Nm) -> Instance {
        Instance::new(
            chars,
            StencilSpec {
                width,
                height: 1000,
                mode: StencilMode::OneDim {
                    rows: 1,
                    row_height: 1000,
                },
            },
            1,
        )
    }

    #[test]
    fn writing_time_nothing_selected_is_vsb_total() {
        let inst = one_row_instance(
            vec![chr(0, 40, 0, 0, 5, vec![10]), chr(1, 40, 0, 0, 3, vec![4])],
            200,
        );
        let r = inst.writing_time(&BTreeSet::new()).unwrap();
        assert_eq!(r.total_time, 10 * 5 + 4 * 3);
        assert_eq!(r.selected_count, 0);
    }

    #[test]
    fn writing_time_both_selected() {
        let inst = one_row_instance(
            vec![chr(0, 40, 0, 0, 5, vec![10]), chr(1, 40, 0, 0, 3, vec![4])],
            200,
        );
        let sel: BTreeSet<_> = [CharId(0), CharId(1)].into_iter().collect();
        let r = inst.writing_time(&sel).unwrap();
        assert_eq!(r.total_time, 62 - 10 * 4 - 4 * 2);
    }

    #[test]
    fn writing_time_unknown_id_is_input_error() {
        let inst = one_row_instance(vec![chr(0, 40, 0, 0, 5, vec![10])], 200);
        let sel: BTreeSet<_> = [CharId(7)].into_iter().collect();
        assert!(matches!(inst.writing_time(&sel), Err(Error::Input(_))));
    }

    #[test]
    fn overlap_is_min_of_facing_blanks() {
        let a = chr(0, 40, 0, 3, 5, vec![1]);
        let b = chr(1, 40, 5, 0, 5, vec![1]);
        assert_eq!(pairwise_overlap(&a, &b, Axis::Horizontal), 3);
        assert_eq!(pairwise_overlap(&b, &a, Axis::Horizontal), 0);
    }

    #[test]
    fn row_length_examples() {
        let a = chr(0, 40, 0, 0, 5, vec![1]);
        assert_eq!(row_length(&[&a]), 40);
        assert_eq!(row_length(&[]), 0);
        let b = chr(1, 10, 0, 2, 5, vec![1]);
        let c = chr(2, 10, 3, 0, 5, vec![1]);
        assert_eq!(row_length(&[&b, &c]), 17);
    }

    #[test]
    fn symmetric_packing_formula() {
        // Reduction-style set: widths 2000, blanks {900, 900, 800}.
        assert_eq!(min_packing_length_symmetric(2000, &[900, 900, 800]), 4300);
        assert_eq!(min_packing_length_symmetric(40, &[5]), 40);
        assert_eq!(min_packing_length_symmetric(10, &[3, 2, 1]), 27);
        assert_eq!(min_packing_length_symmetric(10, &[]), 0);
    }

    #[test]
    fn legality_boundary() {
        let a = chr(0, 40, 2, 2, 5, vec![1]);
        let b = chr(1, 40, 3, 1, 5, vec![1]);
        let inst = one_row_instance(vec![a, b], 200);
        // Abutting with exactly the shared blank min(sr_a, sl_b) = 2.
        let mut p = Placement::new();
        p.insert(CharId(0), Position::Row { row: 0, x: 0 });
        p.insert(CharId(1), Position::Row { row: 0, x: 38 });
        assert!(check_legal(&inst, &p).unwrap().is_legal());
        // One nanometer closer is illegal, with exactly one pair violation.
        let mut p2 = Placement::new();
        p2.insert(CharId(0), Position::Row { row: 0, x: 0 });
        p2.insert(CharId(1), Position::Row { row: 0, x: 37 });
        let rep = check_legal(&inst, &p2).unwrap();
        assert_eq!(rep.violations.len(), 1);
    }

    #[test]
    fn legality_empty_placement() {
        let inst = one_row_instance(vec![], 200);
        assert!(check_legal(&inst, &Placement::new()).unwrap().is_legal());
    }

    #[test]
    fn legality_unknown_id_is_input_error() {
        let inst = one_row_instance(vec![], 200);
        let mut p = Placement::new();
        p.insert(CharId(3), Position::Row { row: 0, x: 0 });
        assert!(matches!(check_legal(&inst, &p), Err(Error::Input(_))));
    }
}
