#pragma once

#include <functional>
#include <string>

namespace betadim {

using WarningSink = std::function<void(const std::string&)>;

// Installs a sink for non-fatal warnings (precision cap crossings and the
// like). Passing an empty function restores the default, which writes to
// stderr. Returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace betadim
