#pragma once

#include <functional>
#include <string>
#include <vector>

namespace ghost {

using WarningHandler = std::function<void(const std::string&)>;

// Non-fatal conditions (regime edges, undersampling) are reported here.
// The default handler prints to stderr with a "warning: " prefix.
void warn(const std::string& message);

/// Installs a new handler and returns the previous one. Passing an empty
/// function silences warnings.
WarningHandler set_warning_handler(WarningHandler handler);

/// RAII helper that collects warnings for the lifetime of the object.
class ScopedWarningCapture {
 public:
  ScopedWarningCapture();
  ~ScopedWarningCapture();
  ScopedWarningCapture(const ScopedWarningCapture&) = delete;
  ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }
  bool contains(const std::string& needle) const;

 private:
  std::vector<std::string> messages_;
  WarningHandler previous_;
};

}  // namespace ghost
