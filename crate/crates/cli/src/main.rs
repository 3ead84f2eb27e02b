fn main() { println!("levylab"); }
