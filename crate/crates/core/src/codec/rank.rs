/// Direction in which ranks count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankConvention {
    /// `R_k = #{l : x_l >= x_k}`; the largest value has rank 1.
    #[default]
    Ge,
    /// `R_k = #{l : x_l <= x_k}`; the smallest value has rank 1.
    Le,
}

/// 1-based ranks of one column. Tied values share the larger count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankVector(Vec<usize>);

impl RankVector {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, k: usize) -> usize {
        self.0[k]
    }
}

/// `R_k = #{l : column[l] >= column[k]}`, self included.
pub fn ranks_desc(column: &[f64]) -> RankVector {
    ranks(column, RankConvention::Ge)
}

pub fn ranks(column: &[f64], convention: RankConvention) -> RankVector {
    let n = column.len();
    let mut sorted = column.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let out = column
        .iter()
        .map(|&x| match convention {
            // everything not strictly below x
            RankConvention::Ge => n - sorted.partition_point(|&v| v < x),
            RankConvention::Le => sorted.partition_point(|&v| v <= x),
        })
        .collect();
    RankVector(out)
}
