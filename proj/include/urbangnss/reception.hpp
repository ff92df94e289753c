#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace urbangnss {

/// Class indices follow the confusion-matrix convention: 0 NLOS-only,
/// 1 LOS-only, 2 LOS+NLOS.
enum class ReceptionCondition { NlosOnly = 0, LosOnly = 1, LosNlos = 2 };

inline constexpr int kNumConditions = 3;

inline int classIndex(ReceptionCondition c) { return static_cast<int>(c); }
inline ReceptionCondition conditionFromIndex(int i) { return static_cast<ReceptionCondition>(i); }

/// Binary collapse used by shadow matching: LOS-only and LOS+NLOS are both LOS.
inline bool isLos(ReceptionCondition c) { return c != ReceptionCondition::NlosOnly; }

std::string_view toString(ReceptionCondition c);
std::optional<ReceptionCondition> conditionFromString(std::string_view s);

}  // namespace urbangnss
