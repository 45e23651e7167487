//! Check the crossed-module axioms of the builtins and of a broken table.
use twohol::group;
use twohol::io::CrossedModuleFile;

fn main() {
    for (name, cm) in group::samples() {
        println!(
            "{name:<10} |G|={} |H|={} violations={}",
            cm.base().order(),
            cm.fiber().order(),
            cm.validate().len()
        );
    }
    let mut f = CrossedModuleFile::from_cm(&group::cm_s3());
    f.act[1][1] = 0;
    let v = f.to_cm().map(|cm| cm.validate()).unwrap_or_default();
    println!(
        "corrupted S3 action: {} violations, first {:?}",
        v.len(),
        v.first()
    );
}
