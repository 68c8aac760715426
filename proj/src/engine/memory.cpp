#include "pira/engine/memory.hpp"

#include <algorithm>
#include <sstream>

namespace pira::engine {

using backend::Action;
using backend::TransitionDecision;

const IntentThread* MemoryState::find(int thread_id) const {
    for (const auto& t : threads) {
        if (t.thread_id == thread_id) return &t;
    }
    return nullptr;
}

std::string MemoryState::render() const {
    std::ostringstream out;
    out << "User profile: " << profile.description << "\n";
    for (const auto& [k, v] : profile.attributes) out << "  - " << k << ": " << v << "\n";
    if (threads.empty()) {
        out << "Intent threads: (none yet)";
        return out.str();
    }
    out << "Intent threads:";
    for (const auto& t : threads) {
        out << "\n  [" << t.thread_id << "] "
            << (t.status == ThreadStatus::active ? "(active) " : "(suspended) ")
            << t.description;
    }
    return out.str();
}

std::string MemoryState::summary() const {
    std::ostringstream out;
    out << threads.size() << " thread(s)";
    if (active_thread) out << ", active=" << *active_thread;
    for (const auto& t : threads) out << " | [" << t.thread_id << "] " << t.description;
    return out.str();
}

namespace {

void suspend_active(MemoryState& m) {
    if (!m.active_thread) return;
    for (auto& t : m.threads) {
        if (t.thread_id == *m.active_thread) t.status = ThreadStatus::suspended;
    }
    m.active_thread.reset();
}

void create_thread(MemoryState& m, const std::string& description, int frame_index) {
    suspend_active(m);
    IntentThread t;
    t.thread_id = m.next_id++;
    t.description = description;
    t.status = ThreadStatus::active;
    t.created_at = frame_index;
    t.updated_at = frame_index;
    m.active_thread = t.thread_id;
    m.threads.push_back(std::move(t));
}

}  // namespace

TransitionOutcome apply_transition(const MemoryState& memory,
                                   const TransitionDecision& decision, int frame_index) {
    TransitionOutcome out;
    out.memory = memory;
    MemoryState& m = out.memory;

    // Reflection deletions first, so delete-then-create replaces a thread
    // atomically within one decision.
    for (int id : decision.delete_intent_ids) {
        auto it = std::find_if(m.threads.begin(), m.threads.end(),
                               [id](const IntentThread& t) { return t.thread_id == id; });
        if (it == m.threads.end()) {
            out.flags.push_back("unknown_delete_id:" + std::to_string(id));
            continue;
        }
        if (m.active_thread && *m.active_thread == id) m.active_thread.reset();
        m.threads.erase(it);
    }

    switch (decision.action) {
        case Action::idle:
            break;
        case Action::create:
            create_thread(m, decision.intent_text, frame_index);
            break;
        case Action::resume: {
            const int id = decision.thread_id.value_or(-1);
            auto it = std::find_if(m.threads.begin(), m.threads.end(),
                                   [id](const IntentThread& t) { return t.thread_id == id; });
            if (it == m.threads.end()) {
                out.flags.push_back("resume_unknown_thread:" + std::to_string(id));
                break;  // degrades to IDLE
            }
            suspend_active(m);
            it->status = ThreadStatus::active;
            it->updated_at = frame_index;
            m.active_thread = id;
            break;
        }
        case Action::update: {
            if (!m.active_thread) {
                // The model clearly perceived an intent; keep it.
                out.flags.push_back("update_without_active");
                create_thread(m, decision.intent_text, frame_index);
                break;
            }
            for (auto& t : m.threads) {
                if (t.thread_id == *m.active_thread) {
                    t.description = decision.intent_text;
                    t.updated_at = frame_index;
                }
            }
            break;
        }
    }
    return out;
}

}  // namespace pira::engine
