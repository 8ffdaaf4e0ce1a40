#include "deso/examples.hpp"

namespace deso {

DescriptorSystem demo_descriptor_plant() {
    DescriptorSystem sys;
    sys.E.resize(3, 3);
    sys.E << 1, 2, 1,
             0, 2, 1,
             1, 0, 0;
    sys.A.resize(3, 3);
    sys.A << 0.153, 0.045, 0.069,
             0.156, 0.252, 0.156,
             0.135, -0.171, -0.636;
    sys.B.resize(3, 1);
    sys.B << 1, 1, 0.2;
    sys.C.resize(2, 3);
    sys.C << 1, 0, 0,
             1, 0, 1;
    return sys;
}

DescriptorSystem demo_uio_plant() {
    DescriptorSystem sys = demo_descriptor_plant();
    Mat F(3, 1);
    F << 1, 0.2, 0.5;
    sys.F = F;
    return sys;
}

LtiSystem demo_lti_plant() {
    LtiSystem lti;
    lti.A0 = demo_descriptor_plant().A;
    lti.B0 = demo_descriptor_plant().B;
    lti.E0.resize(3, 2);
    lti.E0 << 1, 0,
              0, 0,
              0, 1;
    lti.C0.resize(2, 3);
    lti.C0 << 1, 0, 0,
              0, 1, 0;
    lti.F0.resize(2, 2);
    lti.F0 << 1.2, 1,
              0, 1;
    return lti;
}

}  // namespace deso
