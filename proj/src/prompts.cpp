#include "invkit/prompts.hpp"

namespace invkit::prompts {

const std::string_view kGenerationSystem = R"PROMPT(You are an expert C programmer and highly proficient 
in generating strong loop invariants
for C programs that accelerate traditional verifiers' verification process.

## Input format
- A C program instrumented with loop markers of the form: 
  ```c
  INVARIANT_MARKER_k();  // appears at the *start of each loop body*
  ```
  - The program contains a single target property as an assertion of the form:
  ```c
  assert(<target_property>);
  ```
- A target loop marker (e.g., "INVARIANT_MARKER_1")

## Task
- Propose ONE loop invariant that is intended to hold specifically at the target loop marker.
- The invariant should help prove the target property and be inductive if possible.

## Output format
- Output MUST be a single JSON object on one line wrapped in ```json``` tags and nothing else.
- The JSON MUST have exactly these keys:
  - "marker": MUST be exactly the target loop marker (e.g., "INVARIANT_MARKER_1")
  - "content": ONLY a valid C boolean expression for the invariant. 

## Output format example
```json
{"marker":"<target_marker>","content":"<content>"}
```)PROMPT";

const std::string_view kGenerationUser = R"PROMPT(## User Input
### C Program
```c
{program}
```
### Target Loop Marker
{target_marker})PROMPT";

const std::string_view kSimplifySystem = R"PROMPT(## Task
Given the C program and the invariant, your task is to simplify the
invariant to a more compact and general form.

## Output format
- Output MUST be a single JSON object.
- The JSON MUST have exactly these keys:
  - "simplified_invariant": A single compact, inductive, C boolean
    expression, nothing else.
  - "rationale": A short explanation of why you simplified the
    invariant to the given form.
## Output format example
{"simplified_invariant":"<simplified_invariant>",
    "rationale":"<rationale>"}

## Guidelines
- The simplified invariant should be logically weaker than (or
  equivalent to) the original, but still inductive and strong enough
  to prove the target property.
- Prefer LINEAR arithmetic expressions (the verifier struggles with
  non-linear math like x*y)
- Prefer mathematical relationships over case enumeration
- Look for patterns across disjuncts (e.g., repeated structure with
  varying constants)
- Generalize enumerated values to ranges (e.g., "i == 1 || i == 2
  || i == 3" -> "1 <= i && i <= 3")
- Remove tautological constraints (e.g., "a == a", "n <= n",
  "0 <= 0", "a + 0 == a", "true", "1")
- Remove constraints on constant variables (variables initialized
  but never modified in loops)
- Replace redundant constraints with simpler equivalents (e.g.,
  "a <= b && b <= a" -> "a == b")
- Ensure the simplified invariant is still inductive (holds before
  loop and preserved by each iteration)
- Use the program context to understand variable semantics and
  loop structure
- Use ONLY plain ASCII characters in your output (no Unicode symbols))PROMPT";

const std::string_view kSimplifyUser = R"PROMPT(Simplify the following invariant for the given C program and marker.
c_program:
```c
{program}
```
invariant:
```c
{invariant}
```

marker:
```c
{marker}
```)PROMPT";

}  // namespace invkit::prompts

namespace invkit {

std::string fill_template(std::string_view tmpl,
                          const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    bool replaced = false;
    if (tmpl[i] == '{') {
      for (const auto& [name, value] : values) {
        if (tmpl.compare(i + 1, name.size(), name) == 0 && i + 1 + name.size() < tmpl.size() &&
            tmpl[i + 1 + name.size()] == '}') {
          out += value;
          i += name.size() + 2;
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out += tmpl[i++];
  }
  return out;
}

}  // namespace invkit
