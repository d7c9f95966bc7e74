#pragma once

#include <vector>

#include "urllc/rng.hpp"

namespace urllc {

/// Selected RBG indices, ascending, distinct, in [0, m_total).
struct RbgSelection {
  std::vector<int> indices;
};

/// Attempt slot indices within the delay budget, strictly increasing from 0.
struct SlotSchedule {
  std::vector<int> slots;
};

/// Uniformly spaced comb {(offset + round(i*m_total/m_mcs)) mod m_total}.
/// Throws std::domain_error unless 1 <= m_mcs <= m_total and
/// 0 <= offset < m_total.
RbgSelection rbg_comb(int m_total, int m_mcs, int offset);

/// rbg_comb with an offset drawn uniformly from [0, m_total).
RbgSelection select_rbgs(int m_total, int m_mcs, Rng& rng);

/// {floor(i*budget_slots/k) : i = 0..k-1}.
/// Throws std::domain_error unless 1 <= k <= budget_slots.
SlotSchedule select_slots(int k, int budget_slots);

/// Circular gaps between consecutive selected indices (wrapping at m_total).
std::vector<int> circular_gaps(const RbgSelection& sel, int m_total);

}  // namespace urllc
