#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace dtz {

using WarningSink = std::function<void(std::string_view)>;

// Non-fatal conditions (dropped rows, degenerate variance, ...) are routed
// through a process-wide sink. Default sink writes "warning: ..." to stderr.
void warn(std::string_view message);

// Installs `sink` for the lifetime of the guard and restores the previous one.
class ScopedWarningSink {
 public:
  explicit ScopedWarningSink(WarningSink sink);
  ~ScopedWarningSink();
  ScopedWarningSink(const ScopedWarningSink&) = delete;
  ScopedWarningSink& operator=(const ScopedWarningSink&) = delete;

 private:
  WarningSink previous_;
};

}  // namespace dtz
