#include "urllc/grant_scheduler.hpp"

#include <algorithm>
#include <stdexcept>

namespace urllc {

RbgSelection rbg_comb(int m_total, int m_mcs, int offset) {
  if (m_mcs < 1 || m_mcs > m_total) throw std::domain_error("need 1 <= m_mcs <= m_total");
  if (offset < 0 || offset >= m_total) throw std::domain_error("offset out of range");
  RbgSelection sel;
  sel.indices.reserve(static_cast<std::size_t>(m_mcs));
  for (int i = 0; i < m_mcs; ++i) {
    // round(i * m_total / m_mcs), half away from zero
    const int step = (2 * i * m_total + m_mcs) / (2 * m_mcs);
    sel.indices.push_back((offset + step) % m_total);
  }
  std::sort(sel.indices.begin(), sel.indices.end());
  return sel;
}

RbgSelection select_rbgs(int m_total, int m_mcs, Rng& rng) {
  if (m_mcs < 1 || m_mcs > m_total) throw std::domain_error("need 1 <= m_mcs <= m_total");
  const int offset = std::uniform_int_distribution<int>(0, m_total - 1)(rng);
  return rbg_comb(m_total, m_mcs, offset);
}

SlotSchedule select_slots(int k, int budget_slots) {
  if (k < 1 || k > budget_slots) throw std::domain_error("need 1 <= k <= budget_slots");
  SlotSchedule s;
  s.slots.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) s.slots.push_back(i * budget_slots / k);
  return s;
}

std::vector<int> circular_gaps(const RbgSelection& sel, int m_total) {
  const auto& idx = sel.indices;
  std::vector<int> gaps;
  if (idx.empty()) return gaps;
  for (std::size_t i = 0; i + 1 < idx.size(); ++i) gaps.push_back(idx[i + 1] - idx[i]);
  gaps.push_back(idx.front() + m_total - idx.back());
  return gaps;
}

}  // namespace urllc
