#pragma once
// Prompt assets for every LLM role in the pipeline. Versioned so an
// index manifest can record which prompt set produced it.

namespace emem::prompts {

inline constexpr const char* kPromptVersion = "1";

// --- EDU extraction (generic path) -----------------------------------------

inline constexpr const char* kEduExtractSystem =
    "You rewrite conversation sessions into elementary discourse units (EDUs): "
    "short, self-contained event statements. Each EDU is one or two sentences, "
    "names speakers explicitly, expands and normalizes entity mentions using the "
    "session context, and includes inferred dates where the session supports them. "
    "Together the EDUs should recover all information in the session. "
    "Reply with strict JSON only.";

inline constexpr const char* kEduExtractInstructions =
    "Rewrite the session above as a JSON object:\n"
    "{\"edus\": [{\"text\": \"...\", \"src\": [turn indices], \"time_hint\": \"optional date\"}]}\n"
    "Rules: every EDU must be self-contained; src lists the 0-based turn indices that "
    "support it; time_hint is a date string when one can be inferred, else omit it.\n"
    "Example session:\n"
    "[0] Dana: I adopted a puppy from the shelter last weekend.\n"
    "[1] Sam: What breed?\n"
    "[2] Dana: A beagle. I named her Clover.\n"
    "Example reply (session dated 2024-06-12):\n"
    "{\"edus\": [{\"text\": \"Dana adopted a beagle puppy named Clover from the shelter "
    "in early June 2024.\", \"src\": [0, 2], \"time_hint\": \"June 2024\"}]}";

// --- EDU extraction (assistant turns, chunking path) ------------------------

inline constexpr const char* kChunkExtractSystem =
    "You process the assistant turns of a conversation session. You produce two "
    "parallel views: fine-grained atomic EDUs (short self-contained statements), and "
    "structured chunks for cohesive information blocks such as itineraries, step-by-step "
    "plans, comparisons, or lists of recommendations. Reply with strict JSON only.";

inline constexpr const char* kChunkExtractInstructions =
    "Reply as a JSON object:\n"
    "{\"edus\": [{\"text\": \"...\", \"src\": [turn indices], \"time_hint\": \"optional\"}],\n"
    " \"chunks\": [{\"summary\": \"...\", \"content\": \"...\", \"src\": [turn indices]}]}\n"
    "Rules: atomic EDUs capture localized facts. Each chunk groups one cohesive block of "
    "related details, content is the full block text, and summary is 2-3 sentences that "
    "state which user request the block addresses, the information categories it covers, "
    "and its key entities and terms.";

// --- Event-argument extraction ----------------------------------------------

inline constexpr const char* kArgExtractSystem =
    "You analyze one event statement. Treat it as a single event: name its event type "
    "and list role-argument pairs (participants, time, place, purpose, objects, and "
    "other salient constituents). Reply with strict JSON only.";

inline constexpr const char* kArgExtractInstructions =
    "Reply as: {\"event_type\": \"...\", \"args\": [{\"role\": \"...\", \"argument\": \"...\"}]}\n"
    "Arguments must be short surface strings copied or normalized from the statement. "
    "Do not invent constituents.";

// --- Query mention detection -------------------------------------------------

inline constexpr const char* kMentionSystem =
    "You extract surface mentions from a question: entities, noun phrases, and salient "
    "concepts that could anchor a memory lookup, including generic references like "
    "\"my pet\" or \"that trip\". Reply with strict JSON only.";

inline constexpr const char* kMentionNedSystem =
    "You extract named entities from a question (people, places, organizations, works, "
    "dates). Only proper names; skip generic noun phrases. Reply with strict JSON only.";

inline constexpr const char* kMentionInstructions =
    "Reply as: {\"mentions\": [\"...\"]}";

// --- Recall-oriented relevance filters ----------------------------------------

inline constexpr const char* kEduFilterSystem =
    "You select memory statements that could help answer a question. Favor recall: keep "
    "every statement that is plausibly relevant, including borderline ones; later stages "
    "down-weight noise. Reply with strict JSON only.";

inline constexpr const char* kArgFilterSystem =
    "You select argument strings (entities, times, places, concepts) that could relate "
    "to a question. Favor recall: keep borderline candidates. Reply with strict JSON only.";

inline constexpr const char* kFilterInstructions =
    "Reply as: {\"keep\": [numbers of the selected candidates]}";

// --- QA ------------------------------------------------------------------------

inline constexpr const char* kQaCotSystem =
    "You answer a question using retrieved conversation memories. First reason step by "
    "step about which memories matter and what they imply, then give the final concise "
    "answer on its own last line in the form 'Answer: <answer>'.";

inline constexpr const char* kQaDirectSystem =
    "You answer a question using retrieved conversation memories. Reply with only the "
    "concise answer, no explanation.";

// --- LLM judge -------------------------------------------------------------------

inline constexpr const char* kJudgeSystem =
    "You grade whether a model answer is semantically correct given the gold answer. "
    "Accept paraphrases and extra detail when the core answer matches. Reply with strict "
    "JSON only: {\"correct\": true} or {\"correct\": false}.";

} // namespace emem::prompts
