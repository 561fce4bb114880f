#include "crosslink/native/callgraph.hpp"

namespace crosslink::native {

std::set<std::string> NativeCallGraph::successors(const std::string &fn) const
{
    std::set<std::string> out;
    for (auto it = edges.lower_bound({fn, std::string()}); it != edges.end() && it->first == fn; ++it)
        out.insert(it->second);
    return out;
}

NativeCallGraph build_native_cg(const NativeModule &m)
{
    NativeCallGraph g;
    g.module = m.name;
    for (const auto &[name, fn] : m.functions)
    {
        g.nodes.insert(name);
        for (const auto &ins : fn.instrs)
            if (ins.op == Opcode::call)
                g.edges.emplace(name, ins.target);
    }
    return g;
}

} // namespace crosslink::native
