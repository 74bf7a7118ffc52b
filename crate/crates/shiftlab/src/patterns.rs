//! Words on integer rectangles.
//!
//! A pattern is a total assignment of symbols to a `d`-dimensional rectangle
//! `[m_0,n_0] × ⋯ × [m_{d-1},n_{d-1}] ⊆ ℤ^d`.  Language questions are
//! translation-invariant, so two patterns are equal when their
//! origin-anchored domains and contents coincide; absolute coordinates are
//! kept only so that translation and block-code application compose
//! correctly.
//!
//! Cells are stored in row-major order with axis 0 varying fastest.  All
//! values here are immutable after construction and all operations are pure.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::{Error, Result};

/// Reserved id for the padding symbol displayed `#`.
pub const HASH_ID: u32 = u32::MAX - 1;
/// Reserved id for the padding symbol displayed `%`.
pub const PERCENT_ID: u32 = u32::MAX;

/// A symbol, identified by a natural number unique within an alphabet.
///
/// The two padding symbols `#` and `%` have fixed dedicated ids distinct
/// from every content symbol.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u32);

impl Symbol {
    pub const HASH: Symbol = Symbol(HASH_ID);
    pub const PERCENT: Symbol = Symbol(PERCENT_ID);

    pub fn id(self) -> u32 {
        self.0
    }

    /// True for the reserved padding symbols `#` and `%`.
    pub fn is_padding(self) -> bool {
        self.0 >= HASH_ID
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Symbol::HASH => write!(f, "#"),
            Symbol::PERCENT => write!(f, "%"),
            Symbol(id) => write!(f, "s{id}"),
        }
    }
}

/// A finite ordered set of symbols with display names.
///
/// Symbols are kept sorted by id.  Display names are used by the textual
/// formats; `#` and `%` always denote the padding symbols.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
    displays: Vec<String>,
}

impl Alphabet {
    /// Builds an alphabet from `(id, display)` pairs.
    pub fn new(pairs: Vec<(u32, String)>) -> Result<Self> {
        let mut pairs = pairs;
        pairs.sort_by_key(|(id, _)| *id);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::AlphabetMismatch(format!("duplicate id {}", w[0].0)));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for (id, d) in &pairs {
            if !seen.insert(d.clone()) {
                return Err(Error::AlphabetMismatch(format!("duplicate display {d}")));
            }
            match d.as_str() {
                "#" if *id != HASH_ID => {
                    return Err(Error::AlphabetMismatch("display # is reserved".into()))
                }
                "%" if *id != PERCENT_ID => {
                    return Err(Error::AlphabetMismatch("display % is reserved".into()))
                }
                _ => {}
            }
            if *id >= HASH_ID && d != "#" && d != "%" {
                return Err(Error::AlphabetMismatch(format!(
                    "id {id} is reserved for padding"
                )));
            }
            if d.starts_with('?') {
                return Err(Error::AlphabetMismatch(
                    "displays starting with ? are reserved for variables".into(),
                ));
            }
        }
        let (symbols, displays) = pairs.into_iter().map(|(i, d)| (Symbol(i), d)).unzip();
        Ok(Alphabet { symbols, displays })
    }

    /// Content symbols with ids `0..n`, displayed by the given names.
    pub fn from_displays<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        Alphabet::new(
            names
                .iter()
                .enumerate()
                .map(|(i, n)| (i as u32, n.as_ref().to_string()))
                .collect(),
        )
    }

    /// The empty alphabet.
    pub fn empty() -> Self {
        Alphabet { symbols: Vec::new(), displays: Vec::new() }
    }

    /// This alphabet extended with the `#` padding symbol.
    pub fn with_hash(&self) -> Self {
        self.with_symbol(Symbol::HASH, "#")
    }

    /// This alphabet extended with the `%` padding symbol.
    pub fn with_percent(&self) -> Self {
        self.with_symbol(Symbol::PERCENT, "%")
    }

    fn with_symbol(&self, s: Symbol, d: &str) -> Self {
        if self.contains(s) {
            return self.clone();
        }
        let mut pairs: Vec<(u32, String)> = self.pairs();
        pairs.push((s.0, d.to_string()));
        Alphabet::new(pairs).expect("padding extension is always valid")
    }

    pub fn pairs(&self) -> Vec<(u32, String)> {
        self.symbols
            .iter()
            .zip(&self.displays)
            .map(|(s, d)| (s.0, d.clone()))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Symbols in id order.
    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Content symbols only, in id order.
    pub fn content_symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.symbols.iter().copied().filter(|s| !s.is_padding())
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.symbols.binary_search(&s).is_ok()
    }

    pub fn is_subset_of(&self, other: &Alphabet) -> bool {
        self.symbols.iter().all(|s| other.contains(*s))
    }

    pub fn display(&self, s: Symbol) -> String {
        match self.symbols.binary_search(&s) {
            Ok(i) => self.displays[i].clone(),
            Err(_) => match s {
                Symbol::HASH => "#".into(),
                Symbol::PERCENT => "%".into(),
                Symbol(id) => format!("s{id}"),
            },
        }
    }

    pub fn by_display(&self, name: &str) -> Option<Symbol> {
        match name {
            "#" => Some(Symbol::HASH),
            "%" => Some(Symbol::PERCENT),
            _ => self
                .displays
                .iter()
                .position(|d| d == name)
                .map(|i| self.symbols[i]),
        }
    }

    /// Union of two alphabets; displays of `self` win on shared ids.
    pub fn union(&self, other: &Alphabet) -> Result<Self> {
        let mut pairs: BTreeMap<u32, String> = BTreeMap::new();
        for (id, d) in other.pairs() {
            pairs.insert(id, d);
        }
        for (id, d) in self.pairs() {
            pairs.insert(id, d);
        }
        Alphabet::new(pairs.into_iter().collect())
    }
}

/// A `d`-dimensional integer rectangle given by closed intervals per axis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rect {
    intervals: Vec<(i64, i64)>,
}

impl Rect {
    pub fn new(intervals: Vec<(i64, i64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Unsupported("dimension must be at least 1".into()));
        }
        for &(m, n) in &intervals {
            if m > n {
                return Err(Error::Unsupported(format!("empty interval [{m},{n}]")));
            }
        }
        Ok(Rect { intervals })
    }

    /// The origin-anchored rectangle with the given extents.
    pub fn anchored(extents: &[usize]) -> Result<Self> {
        Rect::new(extents.iter().map(|&e| (0, e as i64 - 1)).collect())
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn min(&self, axis: usize) -> i64 {
        self.intervals[axis].0
    }

    pub fn max(&self, axis: usize) -> i64 {
        self.intervals[axis].1
    }

    pub fn extent(&self, axis: usize) -> usize {
        (self.intervals[axis].1 - self.intervals[axis].0 + 1) as usize
    }

    pub fn extents(&self) -> Vec<usize> {
        (0..self.dim()).map(|a| self.extent(a)).collect()
    }

    /// Longest side.
    pub fn side(&self) -> usize {
        (0..self.dim()).map(|a| self.extent(a)).max().unwrap_or(0)
    }

    pub fn cell_count(&self) -> usize {
        (0..self.dim()).map(|a| self.extent(a)).product()
    }

    pub fn min_corner(&self) -> Vec<i64> {
        self.intervals.iter().map(|&(m, _)| m).collect()
    }

    pub fn contains_point(&self, p: &[i64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(&self.intervals)
                .all(|(&x, &(m, n))| m <= x && x <= n)
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.dim() == self.dim()
            && (0..self.dim())
                .all(|a| self.min(a) <= other.min(a) && other.max(a) <= self.max(a))
    }

    pub fn translate(&self, v: &[i64]) -> Rect {
        Rect {
            intervals: self
                .intervals
                .iter()
                .zip(v)
                .map(|(&(m, n), &dv)| (m + dv, n + dv))
                .collect(),
        }
    }

    /// Row-major offset of a point, axis 0 fastest.
    pub fn offset_of(&self, p: &[i64]) -> usize {
        let mut off = 0usize;
        let mut stride = 1usize;
        for (a, &(m, _)) in self.intervals.iter().enumerate() {
            off += (p[a] - m) as usize * stride;
            stride *= self.extent(a);
        }
        off
    }

    /// Points in row-major order (axis 0 fastest).
    pub fn points(&self) -> PointIter {
        PointIter {
            rect: self.clone(),
            next: Some(self.min_corner()),
        }
    }
}

/// Iterator over the lattice points of a rectangle.
pub struct PointIter {
    rect: Rect,
    next: Option<Vec<i64>>,
}

impl Iterator for PointIter {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut axis = 0;
        loop {
            if axis == self.rect.dim() {
                self.next = None;
                break;
            }
            succ[axis] += 1;
            if succ[axis] <= self.rect.max(axis) {
                self.next = Some(succ);
                break;
            }
            succ[axis] = self.rect.min(axis);
            axis += 1;
        }
        Some(cur)
    }
}

/// A total assignment of symbols to a rectangle.
#[derive(Clone)]
pub struct Pattern {
    rect: Rect,
    cells: Vec<Symbol>,
}

impl Pattern {
    pub fn new(rect: Rect, cells: Vec<Symbol>) -> Result<Self> {
        if cells.len() != rect.cell_count() {
            return Err(Error::Unsupported(format!(
                "expected {} cells, got {}",
                rect.cell_count(),
                cells.len()
            )));
        }
        Ok(Pattern { rect, cells })
    }

    /// A one-dimensional word from symbols, anchored at the origin.
    pub fn word(cells: Vec<Symbol>) -> Self {
        let rect = Rect::anchored(&[cells.len()]).expect("nonempty word");
        Pattern { rect, cells }
    }

    /// A one-dimensional word built by display-name lookup.
    pub fn word_from_displays(alphabet: &Alphabet, text: &str) -> Result<Self> {
        let mut cells = Vec::new();
        for tok in text.split_whitespace() {
            let s = alphabet
                .by_display(tok)
                .ok_or_else(|| Error::AlphabetMismatch(format!("unknown symbol {tok}")))?;
            cells.push(s);
        }
        if cells.is_empty() {
            return Err(Error::Unsupported("empty word".into()));
        }
        Ok(Pattern::word(cells))
    }

    /// A constant pattern on the given rectangle.
    pub fn constant(rect: Rect, s: Symbol) -> Self {
        let n = rect.cell_count();
        Pattern { rect, cells: vec![s; n] }
    }

    pub fn dim(&self) -> usize {
        self.rect.dim()
    }

    pub fn rect(&self) -> &Rect {
        &self.rect
    }

    pub fn cells(&self) -> &[Symbol] {
        &self.cells
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Longest side of the domain.
    pub fn side(&self) -> usize {
        self.rect.side()
    }

    pub fn get(&self, p: &[i64]) -> Symbol {
        self.cells[self.rect.offset_of(p)]
    }

    /// Distinct symbols occurring in the pattern, in id order.
    pub fn support(&self) -> Vec<Symbol> {
        let mut set: Vec<Symbol> = self.cells.clone();
        set.sort();
        set.dedup();
        set
    }

    pub fn uses_only(&self, alphabet: &Alphabet) -> bool {
        self.support().iter().all(|s| alphabet.contains(*s))
    }

    /// The shift image: domain moved by `-v`, contents carried along.
    pub fn translate(&self, v: &[i64]) -> Result<Pattern> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        let neg: Vec<i64> = v.iter().map(|&x| -x).collect();
        Ok(Pattern { rect: self.rect.translate(&neg), cells: self.cells.clone() })
    }

    /// The translate anchored with its min corner at the origin.
    pub fn anchored(&self) -> Pattern {
        let m = self.rect.min_corner();
        if m.iter().all(|&x| x == 0) {
            return self.clone();
        }
        let neg: Vec<i64> = m.iter().map(|&x| -x).collect();
        Pattern { rect: self.rect.translate(&neg), cells: self.cells.clone() }
    }

    /// Re-anchors the pattern so its min corner sits at `p`.
    pub fn anchored_at(&self, p: &[i64]) -> Pattern {
        let m = self.rect.min_corner();
        let d: Vec<i64> = p.iter().zip(&m).map(|(&t, &s)| t - s).collect();
        Pattern { rect: self.rect.translate(&d), cells: self.cells.clone() }
    }

    /// Embeds into a higher dimension via `ℤ^d ⊆ ℤ^{d'}`, new axes extent 1.
    pub fn embed(&self, dim: usize) -> Result<Pattern> {
        if dim < self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: dim });
        }
        let mut intervals = self.rect.intervals.clone();
        intervals.resize(dim, (0, 0));
        Ok(Pattern { rect: Rect { intervals }, cells: self.cells.clone() })
    }

    /// Restriction to a sub-rectangle of the domain.
    pub fn restrict(&self, sub: &Rect) -> Result<Pattern> {
        if !self.rect.contains_rect(sub) {
            return Err(Error::DoesNotFit);
        }
        let cells = sub.points().map(|p| self.get(&p)).collect();
        Ok(Pattern { rect: sub.clone(), cells })
    }

    /// Does the anchored translate of `q` at offset `at` (relative to this
    /// pattern's min corner) agree with this pattern?
    pub fn matches_at(&self, q: &Pattern, at: &[i64]) -> bool {
        let base = self.rect.min_corner();
        let qa = q.anchored();
        for p in qa.rect.points() {
            let mut abs = base.clone();
            for a in 0..abs.len() {
                abs[a] += at[a] + p[a];
            }
            if !self.rect.contains_point(&abs) || self.get(&abs) != qa.get(&p) {
                return false;
            }
        }
        true
    }

    /// All offsets (relative to this pattern's min corner) at which some
    /// translate of `q` agrees with this pattern.
    pub fn subpattern_offsets(&self, q: &Pattern) -> Result<Vec<Vec<i64>>> {
        if q.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: q.dim() });
        }
        let d = self.dim();
        let mut offsets = Vec::new();
        let mut ranges = Vec::with_capacity(d);
        for a in 0..d {
            let r = self.rect.extent(a) as i64 - q.rect.extent(a) as i64;
            if r < 0 {
                return Ok(offsets);
            }
            ranges.push((0, r));
        }
        let range_rect = Rect::new(ranges).expect("nonnegative ranges");
        for at in range_rect.points() {
            if self.matches_at(q, &at) {
                offsets.push(at);
            }
        }
        Ok(offsets)
    }

    /// True iff some translate of `q` occurs inside this pattern.
    pub fn contains_subpattern(&self, q: &Pattern) -> bool {
        matches!(self.subpattern_offsets(q), Ok(v) if !v.is_empty())
    }

    /// The canonical placement of a pattern with extents `ext` inside
    /// `target`: centered, ties toward the min corner.  Returns the absolute
    /// min corner of the placement.
    pub fn canonical_placement(ext: &[usize], target: &Rect) -> Result<Vec<i64>> {
        if ext.len() != target.dim() {
            return Err(Error::DimensionMismatch { expected: target.dim(), got: ext.len() });
        }
        let mut anchor = Vec::with_capacity(ext.len());
        for a in 0..ext.len() {
            let slack = target.extent(a) as i64 - ext[a] as i64;
            if slack < 0 {
                return Err(Error::DoesNotFit);
            }
            anchor.push(target.min(a) + slack / 2);
        }
        Ok(anchor)
    }

    /// Streams every pattern on `target` that restricts to this pattern at
    /// the canonical centered placement, in row-major/symbol-id order.
    pub fn extensions(&self, target: &Rect, alphabet: &Alphabet) -> Result<ExtensionStream> {
        let anchor = Pattern::canonical_placement(&self.rect.extents(), target)?;
        let placed = self.anchored_at(&anchor);
        let mut fixed = vec![None; target.cell_count()];
        for p in placed.rect().points() {
            fixed[target.offset_of(&p)] = Some(placed.get(&p));
        }
        let free: Vec<usize> = (0..fixed.len()).filter(|&i| fixed[i].is_none()).collect();
        Ok(ExtensionStream {
            target: target.clone(),
            base: fixed,
            free,
            alphabet: alphabet.clone(),
            counter: Some(Vec::new()),
        })
    }

    /// Number of extensions of this pattern to `target` over `alphabet`.
    pub fn extensions_count(&self, target: &Rect, alphabet: &Alphabet) -> Result<u128> {
        let free = target.cell_count() - self.cell_count();
        Ok((alphabet.len() as u128).pow(free as u32))
    }

    pub fn display(&self, alphabet: &Alphabet) -> String {
        render_cells(&self.rect, |off| alphabet.display(self.cells[off]))
    }
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        self.rect.extents() == other.rect.extents() && self.cells == other.cells
    }
}

impl Eq for Pattern {}

impl std::hash::Hash for Pattern {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rect.extents().hash(state);
        self.cells.hash(state);
    }
}

impl Ord for Pattern {
    /// Word order: total cell count, then extent vector, then contents.
    fn cmp(&self, other: &Self) -> Ordering {
        self.cell_count()
            .cmp(&other.cell_count())
            .then_with(|| self.rect.extents().cmp(&other.rect.extents()))
            .then_with(|| self.cells.cmp(&other.cells))
    }
}

impl PartialOrd for Pattern {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern{:?}{:?}", self.rect.extents(), self.cells)
    }
}

/// Deterministic single-consumer stream of extensions.
pub struct ExtensionStream {
    target: Rect,
    base: Vec<Option<Symbol>>,
    free: Vec<usize>,
    alphabet: Alphabet,
    /// Mixed-radix counter over the free cells; `None` when exhausted.
    counter: Option<Vec<usize>>,
}

impl Iterator for ExtensionStream {
    type Item = Pattern;

    fn next(&mut self) -> Option<Pattern> {
        let counter = self.counter.as_mut()?;
        if counter.is_empty() {
            counter.resize(self.free.len(), 0);
            if !self.free.is_empty() && self.alphabet.is_empty() {
                self.counter = None;
                return None;
            }
        } else {
            // advance, most significant digit = last free cell
            let mut i = 0;
            loop {
                if i == counter.len() {
                    self.counter = None;
                    return None;
                }
                counter[i] += 1;
                if counter[i] < self.alphabet.len() {
                    break;
                }
                counter[i] = 0;
                i += 1;
            }
            if self.free.is_empty() {
                self.counter = None;
                return None;
            }
        }
        let counter = self.counter.as_ref()?;
        let mut cells: Vec<Symbol> = Vec::with_capacity(self.base.len());
        let mut fi = 0;
        for b in &self.base {
            match b {
                Some(s) => cells.push(*s),
                None => {
                    cells.push(self.alphabet.symbols()[counter[fi]]);
                    fi += 1;
                }
            }
        }
        if self.free.is_empty() {
            self.counter = None;
        }
        Some(Pattern { rect: self.target.clone(), cells })
    }
}

/// A cell of a variable-bearing pattern: either a symbol or a variable
/// drawn from a disjoint namespace.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Cell {
    Sym(Symbol),
    Var(u32),
}

/// A pattern whose cells may also hold variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct VariablePattern {
    rect: Rect,
    cells: Vec<Cell>,
}

impl VariablePattern {
    pub fn new(rect: Rect, cells: Vec<Cell>) -> Result<Self> {
        if cells.len() != rect.cell_count() {
            return Err(Error::Unsupported(format!(
                "expected {} cells, got {}",
                rect.cell_count(),
                cells.len()
            )));
        }
        Ok(VariablePattern { rect, cells })
    }

    pub fn word(cells: Vec<Cell>) -> Self {
        let rect = Rect::anchored(&[cells.len()]).expect("nonempty word");
        VariablePattern { rect, cells }
    }

    pub fn from_pattern(p: &Pattern) -> Self {
        VariablePattern {
            rect: p.rect.clone(),
            cells: p.cells.iter().map(|&s| Cell::Sym(s)).collect(),
        }
    }

    pub fn rect(&self) -> &Rect {
        &self.rect
    }

    pub fn dim(&self) -> usize {
        self.rect.dim()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Variables occurring, ascending.
    pub fn variables(&self) -> Vec<u32> {
        let mut vs: Vec<u32> = self
            .cells
            .iter()
            .filter_map(|c| match c {
                Cell::Var(v) => Some(*v),
                Cell::Sym(_) => None,
            })
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Content symbols mentioned, ascending.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut ss: Vec<Symbol> = self
            .cells
            .iter()
            .filter_map(|c| match c {
                Cell::Sym(s) => Some(*s),
                Cell::Var(_) => None,
            })
            .collect();
        ss.sort();
        ss.dedup();
        ss
    }

    pub fn is_ground(&self) -> bool {
        self.variables().is_empty()
    }

    /// Replaces each variable cell by its image under `assignment`.
    pub fn substitute(&self, assignment: &BTreeMap<u32, Symbol>) -> Result<Pattern> {
        let mut cells = Vec::with_capacity(self.cells.len());
        for c in &self.cells {
            match c {
                Cell::Sym(s) => cells.push(*s),
                Cell::Var(v) => match assignment.get(v) {
                    Some(s) => cells.push(*s),
                    None => return Err(Error::UnboundVariable(*v)),
                },
            }
        }
        Ok(Pattern { rect: self.rect.clone(), cells })
    }

    /// A ground variable pattern as a plain pattern.
    pub fn to_pattern(&self) -> Result<Pattern> {
        self.substitute(&BTreeMap::new())
    }

    /// Literal containment, treating variables as letters of their own.
    pub fn contains_literal(&self, q: &VariablePattern) -> bool {
        if q.dim() != self.dim() {
            return false;
        }
        let d = self.dim();
        let mut ranges = Vec::with_capacity(d);
        for a in 0..d {
            let r = self.rect.extent(a) as i64 - q.rect.extent(a) as i64;
            if r < 0 {
                return false;
            }
            ranges.push((0, r));
        }
        let range_rect = Rect::new(ranges).expect("nonnegative ranges");
        let sa = {
            let mut s = self.clone();
            let m = s.rect.min_corner();
            let neg: Vec<i64> = m.iter().map(|x| -x).collect();
            s.rect = s.rect.translate(&neg);
            s
        };
        let qext = q.rect.extents();
        'outer: for at in range_rect.points() {
            let sub = Rect::new(
                (0..d)
                    .map(|a| (at[a], at[a] + qext[a] as i64 - 1))
                    .collect(),
            )
            .expect("in range");
            let mut qi = q.cells.iter();
            for p in sub.points() {
                if sa.cells[sa.rect.offset_of(&p)] != *qi.next().unwrap() {
                    continue 'outer;
                }
            }
            return true;
        }
        false
    }

    pub fn display(&self, alphabet: &Alphabet) -> String {
        render_cells(&self.rect, |off| match self.cells[off] {
            Cell::Sym(s) => alphabet.display(s),
            Cell::Var(v) => format!("?{v}"),
        })
    }
}

/// Renders cells line by line: axis 0 within a line, axis 1 across lines,
/// axis `k ≥ 2` separated by `k-1` blank lines.
fn render_cells(rect: &Rect, cell: impl Fn(usize) -> String) -> String {
    let mut out = String::new();
    let mut prev: Option<Vec<i64>> = None;
    for p in rect.points() {
        if let Some(q) = &prev {
            // count trailing axes that rolled over
            let mut rolled = 0;
            for a in (1..rect.dim()).rev() {
                if p[a] != q[a] {
                    rolled = a;
                    break;
                }
            }
            if rolled >= 1 {
                for _ in 0..rolled {
                    out.push('\n');
                }
            } else {
                out.push(' ');
            }
        }
        out.push_str(&cell(rect.offset_of(&p)));
        prev = Some(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ab() -> Alphabet {
        Alphabet::from_displays(&["a", "b"]).unwrap()
    }

    fn w(text: &str) -> Pattern {
        Pattern::word_from_displays(&ab(), text).unwrap()
    }

    #[test]
    fn translate_identity_and_shift() {
        let p = w("a b");
        let t0 = p.translate(&[0]).unwrap();
        assert_eq!(t0.rect().min(0), 0);
        assert_eq!(t0, p);

        let t3 = p.translate(&[3]).unwrap();
        assert_eq!(t3.rect().min(0), -3);
        assert_eq!(t3.rect().max(0), -2);
        assert_eq!(t3, p); // equality is translation-invariant
    }

    #[test]
    fn translate_2d() {
        let rect = Rect::anchored(&[1, 2]).unwrap();
        let p = Pattern::new(rect, vec![Symbol(0), Symbol(1)]).unwrap();
        let t = p.translate(&[1, 1]).unwrap();
        assert_eq!(t.rect().min_corner(), vec![-1, -1]);
        assert_eq!(t.cells(), p.cells());
    }

    #[test]
    fn translate_dimension_mismatch() {
        let p = w("a b");
        assert!(matches!(p.translate(&[1, 2]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn containment_basics() {
        let aba = w("a b a");
        assert_eq!(aba.subpattern_offsets(&w("b")).unwrap(), vec![vec![1]]);
        assert_eq!(aba.subpattern_offsets(&aba).unwrap(), vec![vec![0]]);
        assert!(w("a a b").subpattern_offsets(&w("b a")).unwrap().is_empty());
    }

    #[test]
    fn containment_is_translation_invariant() {
        let p = w("a b a");
        let q = w("b a");
        let shifted = p.translate(&[5]).unwrap();
        assert_eq!(
            p.subpattern_offsets(&q).unwrap(),
            shifted.subpattern_offsets(&q).unwrap()
        );
    }

    #[test]
    fn extensions_anchor_left_on_ties() {
        let p = w("a");
        let target = Rect::anchored(&[2]).unwrap();
        let exts: Vec<Pattern> = p.extensions(&target, &ab()).unwrap().collect();
        assert_eq!(exts, vec![w("a a"), w("a b")]);
    }

    #[test]
    fn extensions_no_free_cells() {
        let p = w("a b");
        let target = Rect::anchored(&[2]).unwrap();
        let exts: Vec<Pattern> = p.extensions(&target, &ab()).unwrap().collect();
        assert_eq!(exts, vec![w("a b")]);
    }

    #[test]
    fn extensions_count_formula() {
        let abc = Alphabet::from_displays(&["a", "b", "c"]).unwrap();
        let rect = Rect::anchored(&[2, 1]).unwrap();
        let p = Pattern::new(rect, vec![Symbol(0), Symbol(1)]).unwrap();
        let target = Rect::anchored(&[2, 2]).unwrap();
        assert_eq!(p.extensions_count(&target, &abc).unwrap(), 9);
        assert_eq!(p.extensions(&target, &abc).unwrap().count(), 9);
    }

    #[test]
    fn extensions_exhaustive_and_duplicate_free() {
        let p = w("a");
        let target = Rect::anchored(&[3]).unwrap();
        let exts: Vec<Pattern> = p.extensions(&target, &ab()).unwrap().collect();
        assert_eq!(exts.len(), 4);
        let set: std::collections::BTreeSet<_> = exts.iter().cloned().collect();
        assert_eq!(set.len(), 4);
        // canonical placement of a length-1 word in a length-3 target is cell 1
        for e in &exts {
            assert_eq!(e.get(&[1]), Symbol(0));
        }
    }

    #[test]
    fn substitute_examples() {
        let a0 = Symbol(0);
        let b = Symbol(1);
        let vp = VariablePattern::word(vec![Cell::Sym(a0), Cell::Var(0)]);
        let mut sigma = BTreeMap::new();
        sigma.insert(0, b);
        let got = vp.substitute(&sigma).unwrap();
        assert_eq!(got, Pattern::word(vec![a0, b]));

        let ground = VariablePattern::word(vec![Cell::Sym(a0)]);
        assert_eq!(ground.substitute(&BTreeMap::new()).unwrap(), Pattern::word(vec![a0]));

        let vp2 = VariablePattern::word(vec![Cell::Var(0), Cell::Var(1), Cell::Sym(a0)]);
        let mut sigma2 = BTreeMap::new();
        sigma2.insert(0, b);
        sigma2.insert(1, b);
        assert_eq!(
            vp2.substitute(&sigma2).unwrap(),
            Pattern::word(vec![b, b, a0])
        );
    }

    #[test]
    fn substitute_unbound_variable() {
        let vp = VariablePattern::word(vec![Cell::Var(7)]);
        assert!(matches!(
            vp.substitute(&BTreeMap::new()),
            Err(Error::UnboundVariable(7))
        ));
    }

    #[test]
    fn literal_containment_with_variables() {
        let xax = VariablePattern::word(vec![Cell::Var(0), Cell::Sym(Symbol(0)), Cell::Var(0)]);
        let x = VariablePattern::word(vec![Cell::Var(0)]);
        let y = VariablePattern::word(vec![Cell::Var(1)]);
        assert!(xax.contains_literal(&x));
        assert!(!xax.contains_literal(&y));
    }

    #[test]
    fn render_1d_and_2d() {
        assert_eq!(w("a b a").display(&ab()), "a b a");
        let rect = Rect::anchored(&[2, 2]).unwrap();
        let p = Pattern::new(rect, vec![Symbol(0), Symbol(1), Symbol(1), Symbol(0)]).unwrap();
        assert_eq!(p.display(&ab()), "a b\nb a");
    }

    proptest! {
        #[test]
        fn prop_containment_translation_invariant(
            cells in proptest::collection::vec(0u32..2, 1..6),
            sub in proptest::collection::vec(0u32..2, 1..3),
            shift in -5i64..5,
        ) {
            let p = Pattern::word(cells.iter().map(|&c| Symbol(c)).collect());
            let q = Pattern::word(sub.iter().map(|&c| Symbol(c)).collect());
            let moved = p.translate(&[shift]).unwrap();
            prop_assert_eq!(
                p.subpattern_offsets(&q).unwrap(),
                moved.subpattern_offsets(&q).unwrap()
            );
        }

        #[test]
        fn prop_pattern_contains_its_restrictions(
            cells in proptest::collection::vec(0u32..3, 1..7),
            lo in 0usize..6,
            hi in 0usize..6,
        ) {
            let n = cells.len();
            let (lo, hi) = (lo.min(n - 1), hi.min(n - 1));
            let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
            let p = Pattern::word(cells.iter().map(|&c| Symbol(c)).collect());
            let sub = p
                .restrict(&Rect::new(vec![(lo as i64, hi as i64)]).unwrap())
                .unwrap();
            prop_assert!(p.contains_subpattern(&sub));
        }

        #[test]
        fn prop_extension_count_matches(
            len in 1usize..3,
            target_len in 1usize..5,
        ) {
            prop_assume!(len <= target_len);
            let p = Pattern::word(vec![Symbol(0); len]);
            let target = Rect::anchored(&[target_len]).unwrap();
            let stream = p.extensions(&target, &ab()).unwrap();
            let expected = 2u128.pow((target_len - len) as u32);
            prop_assert_eq!(stream.count() as u128, expected);
        }
    }
}
