#pragma once

// Prompt texts sent to language models. These are external interfaces: the
// wording must not drift, since fine-tuned models were trained against it.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace invkit {

namespace prompts {
extern const std::string_view kGenerationSystem;
extern const std::string_view kGenerationUser;  // {program}, {target_marker}
extern const std::string_view kSimplifySystem;
extern const std::string_view kSimplifyUser;  // {program}, {invariant}, {marker}
}  // namespace prompts

/// Replaces each `{name}` placeholder in one left-to-right pass, so text
/// substituted for one placeholder is never rescanned for another.
std::string fill_template(std::string_view tmpl,
                          const std::vector<std::pair<std::string, std::string>>& values);

struct PromptPair {
  std::string system;
  std::string user;
};

}  // namespace invkit
