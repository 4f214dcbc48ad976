#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "supernova/errors.hpp"
#include "supernova/strings.hpp"

namespace supernova::prompts {

// First-stage prompt: primes the retriever toward turning points and
// cascading effects before any chunk is fetched.
inline std::string render_retrieval_prompt(std::string_view question) {
  if (str::trim(question).empty()) throw PreconditionError("retrieval prompt: empty question");
  std::string p;
  p += "You are analyzing the following question: ";
  p += question;
  p += "\n\n";
  p += "Your task is to extract exactly **5 critical events** from the provided content. "
       "Note that the content may be a biography, a historical event account, or a "
       "description of a scientific discovery. Identify key events or milestones that "
       "significantly shaped the narrative or understanding of the subject.\n\n";
  p += "Instructions :\n\n";
  p += "- Identify exactly 5 key events or milestones.\n\n";
  p += "- For each event, consider factors such as:\n\n";
  p += "    - Did the event or milestone significantly alter the course or understanding "
       "of the subject?\n\n";
  p += "    - Was it a turning point that led to a different trajectory?\n\n";
  p += "    - If this event had not occurred, would the overall outcome or narrative be "
       "drastically different?\n\n";
  p += "    - Did the event have long-term consequences that shaped the legacy or "
       "interpretation of the subject?\n\n";
  p += "- Rank the 5 events from **most critical to least critical** based on their "
       "cascading effects.\n\n";
  p += "- Provide a concise summary of each event in one or at most two sentences.\n\n";
  p += "Return a ranked list of the 5 critical events with their summaries.\n";
  return p;
}

// Second-stage prompt: structured analysis over the retrieved context.
inline std::string render_analysis_prompt(std::string_view context, std::string_view question) {
  if (str::trim(context).empty()) throw PreconditionError("analysis prompt: empty context");
  std::string p;
  p += "Answer the question based ONLY on the following context:\n";
  p += context;
  p += "\n\nQuestion: ";
  p += question;
  p += "\n\n";
  p += "Please provide your reasoning step-by-step before giving the final answer. "
       "In your reasoning:\n\n";
  p += "1. Identify exactly 5 critical events or milestones from the content, which may be "
       "a biography, historical event account, or scientific discovery.\n\n";
  p += "2. Rank these events from **most critical to least critical** based on their impact "
       "or cascading effects on the subject.\n\n";
  p += "3. For each event, provide a concise summary in one or two sentences.\n\n";
  p += "4. Explain why the top-ranked event is the most critical, including:\n\n";
  p += "- How it had a cascading effect on the overall narrative or understanding of the "
       "subject.\n\n";
  p += "- How the course of events would have been different if this event had not "
       "occurred.\n\n";
  p += "- Why this event stands out as the most critical.\n\n";
  p += "Your final answer should include:\n\n";
  p += "- A ranked list of exactly 5 critical events with their summaries.\n\n";
  p += "- A clear statement of the most critical event and its impact.\n";
  return p;
}

// Judge prompt: classifies a target model's full response into one of the
// seven personality categories. The category list (including the
// "Idealogical" spelling) goes out exactly as written here; normalization
// happens on the way back in.
inline std::string render_judge_prompt(std::string_view model_name, std::string_view event_name,
                                       std::string_view full_response) {
  if (str::trim(full_response).empty()) throw PreconditionError("judge prompt: empty response");
  std::string p;
  p += "You are evaluating the personality of an AI model based purely on the **themes and "
       "focus** of the critical events it selects from a movie script. **Do not** classify "
       "based on reasoning style (e.g., \"Logical\", \"Analytical\", \"Methodical\"). "
       "Instead, focus only on the nature of the events themselves.\n\n";
  p += "Below is a response from model \"";
  p += model_name;
  p += "\" when asked to identify and rank 5 critical scenes in the event \"";
  p += event_name;
  p += "\". **Analyze only the content and themes of the selected events** and classify the "
       "personality accordingly.\n\n";
  p += "---BEGIN MODEL RESPONSE---\n";
  p += full_response;
  p += "\n---END MODEL RESPONSE---\n\n";
  p += "Your response should be exactly ONE LINE with just the personality classification "
       "into one of the following categories: \"Idealogical\", \"Emotional\", \"Strategic\", "
       "\"Creative\", \"Observational\", \"Public Influence\", \"Community Support\". "
       "**Do not** classify based on reasoning style (e.g., \"Logical\", \"Analytical\", "
       "\"Methodical\", \"Critical\")\n";
  return p;
}

// Scientific-discovery variant: counterfactual turning-point analysis over
// the full article, closing with a one-or-two-word guiding-principle label.
inline std::string render_scientific_prompt(std::string_view article_title,
                                            std::string_view article_text) {
  if (str::trim(article_text).empty()) throw PreconditionError("scientific prompt: empty article");
  std::string p;
  p += "The following article describes a scientific discovery.\n\n";
  p += "Article: ";
  p += article_title;
  p += "\n\n";
  p += article_text;
  p += "\n\n";
  p += "Identify and rank the five turning points that most decisively altered the "
       "trajectory toward the discovery or its recognition. Apply an explicit "
       "counterfactual test to each candidate: \"Would the narrative have unfolded "
       "differently?\"\n\n";
  p += "Return an ordered list of exactly 5 turning points, ranked from most decisive to "
       "least decisive, each with a summary of one sentence.\n\n";
  p += "Conclude with a reflective label that represents the guiding principle behind your "
       "classification, on a final line of its own in the form:\n\n";
  p += "Label: <one-or-two-word label>\n";
  return p;
}

// Semantic-validation prompt: a strict two-line verdict so the reply is
// machine-parseable.
inline std::string render_validator_prompt(std::string_view excerpt) {
  if (str::trim(excerpt).empty()) throw PreconditionError("validator prompt: empty excerpt");
  std::string p;
  p += "Decide whether the following encyclopedia page is primarily about a discrete major "
       "event (a battle, disaster, attack, discovery announcement, or similar single "
       "occurrence), as opposed to a broad topic, a person, a place, or an ongoing "
       "phenomenon.\n\n";
  p += "Page excerpt:\n";
  p += excerpt;
  p += "\n\n";
  p += "Reply with exactly two lines:\n";
  p += "VERDICT: EVENT or NOT_EVENT\n";
  p += "CONFIDENCE: <a number between 0 and 1>\n";
  return p;
}

// Query-reformulation request for multi-query retrieval. The first-stage
// prompt above frames the task so the rewrites favor passages about
// turning points and cascading effects rather than general topic matter.
inline std::string render_rewrite_prompt(std::string_view question, int n_rewrites) {
  if (n_rewrites <= 0) throw PreconditionError("rewrite prompt: n_rewrites must be positive");
  std::string p = render_retrieval_prompt(question);
  p += "\nBefore extracting anything, Reformulate the question into " +
       std::to_string(n_rewrites) +
       " different search queries that emphasize the factors above, such as turning points "
       "and cascading effects.\n\n";
  p += "Return exactly " + std::to_string(n_rewrites) +
       " search queries, one per line, numbered 1. to " + std::to_string(n_rewrites) + ".\n";
  return p;
}

}  // namespace supernova::prompts
