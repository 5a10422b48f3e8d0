// Operations on broken (elementwise) fields: exact curl/div coefficient
// images, L2 norms of inter-element trace jumps, and pointwise evaluation.
#ifndef COMMUTEPROJ_BROKENOPS_HPP
#define COMMUTEPROJ_BROKENOPS_HPP

#include <vector>

#include "commuteproj/context.hpp"

namespace cpj {

/// curl of a broken ND_q field as an RT_q broken field.
BrokenField broken_curl(MeshContext& ctx, const BrokenField& v);

/// div of a broken RT_q field as a P_q broken field.
BrokenField broken_div(MeshContext& ctx, const BrokenField& v);

/// L2 norm over the given faces of the normal (RT) or tangential (ND)
/// component jump. Interior faces take the two-sided difference along the
/// fixed face normal; boundary faces take the trace itself.
double face_jump_l2(MeshContext& ctx, const BrokenField& v,
                    const std::vector<int>& faces, bool tangential);

/// Interior faces of the subdomain spanned by `elements` plus the faces of
/// `extra_boundary` (e.g. Gamma_N), i.e. the face set on which a conforming
/// field with essential conditions must have vanishing jumps/traces.
std::vector<int> conformity_faces(const TetMesh& mesh,
                                  const std::vector<int>& elements,
                                  const std::vector<int>& extra_boundary);

}  // namespace cpj

#endif
