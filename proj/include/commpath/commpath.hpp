#pragma once

#include "commpath/core/assignment.hpp"
#include "commpath/core/joint_diag.hpp"
#include "commpath/core/linalg.hpp"
#include "commpath/core/morphism.hpp"
#include "commpath/core/types.hpp"
#include "commpath/pma/cpma.hpp"
#include "commpath/pma/grid.hpp"
#include "commpath/interpolant/correction.hpp"
#include "commpath/interpolant/interpolant.hpp"
#include "commpath/interpolant/log_generator.hpp"
#include "commpath/manifold/atlas.hpp"
#include "commpath/manifold/manifold_cpma.hpp"
#include "commpath/manifold/residuals.hpp"
#include "commpath/paths/connect.hpp"
#include "commpath/paths/path.hpp"
#include "commpath/paths/segment.hpp"
#include "commpath/scp/scp.hpp"
#include "commpath/verify/certificate.hpp"
#include "commpath/cli/instances.hpp"
#include "commpath/cli/io.hpp"
#include "commpath/cli/trace.hpp"
#include "commpath/cli/commands.hpp"
