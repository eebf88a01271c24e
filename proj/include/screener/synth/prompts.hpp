#pragma once

#include <string_view>

// Prompt templates. Placeholders use {name} and are filled by text::render.
namespace screener::synth::prompts {

inline constexpr std::string_view kReady = R"(Eligibility requirements: {eligibility_requirements}. 

Is the information sufficient to determine whether any member of the user's household is eligible for all programs? Answer only in one word True or False.)";

inline constexpr std::string_view kPredict = R"(Eligibility: {eligibility_requirements}. 

Predict the programs for which any member of the user's household is eligible. Return only a boolean array of length {num_programs}, e.g. {example_array}, where the value at index `i` is true iff the user is eligible for program `i`. Only return the array. Do not return anything else in the response. If a user's eligibility is unclear, make your best guess.)";

inline constexpr std::string_view kAsk = R"(Eligibility: {eligibility_requirements}. 

Ask a clarifying question that will help you determine if any member of the user's household is eligible for benefits as efficiently as possible. Only ask about one fact at a time.)";

inline constexpr std::string_view kReadyCot = R"(Eligibility requirements: {eligibility_requirements}. 

Is the information sufficient to determine whether any member of the user's household is eligible for all programs? Think through your reasoning out loud. Then answer with True or False.)";

// Second pass of the two-pass ready check. Assembled from the constrained
// predict prompt's reasoning preamble and the plain ready question.
inline constexpr std::string_view kReadyConstrained = R"(Reasoning: {reasoning}. 

Using the reasoning above, is the information sufficient to determine whether any member of the user's household is eligible for all programs? Answer only in one word True or False.)";

inline constexpr std::string_view kPredictReasoning = R"(Eligibility: {eligibility_requirements}. 

Predict the programs for which any member of the user's household is eligible. Return only a boolean array of length {num_programs}, e.g. {example_array}, where the value at index `i` is true iff the user is eligible for program `i`. Only return the array. Do not return anything else in the response. If a user's eligibility is unclear, make your best guess. Think through your reasoning out loud.)";

inline constexpr std::string_view kPredictConstrained = R"(Reasoning: {reasoning}. 

Using the reasoning above, predict the programs for which any member of the user's household is eligible. Output a boolean array of length {num_programs}, e.g. {example_array}, where the value at index `i` is true iff the user is eligible for program `i`. If a user's eligibility is unclear, make your best guess.)";

inline constexpr std::string_view kAskReact = R"(Eligibility: {eligibility_requirements}. 

Ask a clarifying question that will help you determine if any member of the user's household is eligible for benefits as efficiently as possible. Only ask about one fact at a time. Think through your reasoning out loud, then state your question after a colon, e.g. Question: What is the user's age?)";

inline constexpr std::string_view kGenerateChecker = R"({attempt_no}

Eligibility Requirements:  
{eligibility_requirement}

Write a python function called check_eligibility that takes a dictionary hh containing relevant information and determines user eligibility. hh is a special dictionary connected to a language model that is conversing with the user. Any time it does not contain a key, it will determine that information from the user. As a result here are some requirements for interacting with hh:

- DO NOT use dict.get() anywhere in the code. Key errors will be handled elsewhere.
- Do not use default values.
- Do not use any f-strings, curly brackets, or dynamically generated strings in your keys.
- Use only literal strings in keys.
- Do not use try-except blocks.
- If you need to access data for individuals (rather than the household as a whole) you can use integer indexing. hh[0] is the head of the household. 

check_eligibility returns a bool. All keys and values of hh are strings. If you write helper functions, keep them inside the check_eligibility function. Make your code as detailed as possible capturing every edge case. Remember that the household may have no relevant members, so be sure to ask about the composition of the household. For example, for childcare programs, check that the household has at least one child. After each new lookup in hh, write a comment suggesting a question to ask. 

The following is a set of preexisting keys and values in the hh dictionary; take care not to duplicate them.

{preexisting_keys}

Avoid using int() and use float() instead. Do not provide anything besides code in your response. Do not use input for user input.)";

// Appended to kGenerateChecker. Our own text: the parser accepts only this
// subset of Python.
inline constexpr std::string_view kGrammarNote = R"(

Your code must stay inside the following subset of Python or it will be rejected and you will be asked again. Allowed statements: `if <condition>:` with optional `elif <condition>:` and `else:` blocks, `return True`, `return False`, `name = <expression>`, `pass`, and `for member in hh:` to visit each person in the household (read their values with `member["key"]` inside the loop; the loop uses hh["size"], the number of people in the household). A condition is exactly one comparison (<, <=, ==, !=, >=, >) between expressions built from numbers, quoted strings, True/False, variables, `hh["key"]`, `hh[0]["key"]` and + - * /. `float(...)` may wrap a value. Express "and" by nesting if statements and "or" with elif branches; the words and, or, not are not allowed. No other function calls, no loops other than the member loop, no nested functions. Every path must end in a return.)";

inline constexpr std::string_view kGetType = R"(Context:  
{eligibility_requirements}

Code:  
{code}

Target key:  
{key}

Question: Given the code and context above, what do you expect {key} to be an integer, a float, or one choice from a set of strings? Return ONLY int, float, or choice.)";

inline constexpr std::string_view kGetValues = R"(Context:  
{eligibility_requirements}

Code:  
{code}

Target key:  
{key}

Question: Given the code and context above, what are the possible values of {key}? Return ONLY the list of possible values in a list of strings. For example, return ["a", "b", "c"].)";

inline constexpr std::string_view kExtractValues = R"(Context:  
{eligibility_requirements}

Line:  
```{line}```

We need to extract the value of {key} from the following dialog:

Question: {cq}  
Answer: {answer}

What should we set as the value of {key}? Return ONLY the value.)";

inline constexpr std::string_view kKeyError = R"(Context:  
{eligibility_requirements}

Line:  
```{line}```

We need to determine what value of {key} should be stored in the hh dictionary. Ask a question to the user that would get this value. For example, for age_i, ask "What is the age of person i?". Return ONLY the question.)";

}  // namespace screener::synth::prompts

#include <string>

namespace screener::synth {

// "[true, false, true]" style example of length n for the predict prompts.
inline std::string example_array(int n) {
    std::string out = "[";
    for (int i = 0; i < n; ++i) {
        if (i) out += ", ";
        out += i % 2 == 0 ? "true" : "false";
    }
    return out + "]";
}

}  // namespace screener::synth
